// Copyright 2026 The Harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <httplib.h>

#include "harness/service/service.hpp"
#include "test_support.hpp"

namespace harness::service {
namespace {

using harness::testing::TempDir;

app::AppConfig fixture_config(const std::filesystem::path& data_dir) {
  auto cfg = app::AppConfig::load(testing::fixtures_dir() / "harness.conf",
                                  [](const std::string&) { return std::optional<std::string>{}; });
  cfg.data_dir = data_dir;
  cfg.llm = "fixture:" + (testing::fixtures_dir() / "transcript.json").string();
  return cfg;
}

void ingest(app::Workspace& ws) {
  const corpus::ChunkingPolicy policy{ws.config().chunk_max_tokens, ws.config().chunk_overlap};
  std::ifstream inc(testing::fixtures_dir() / "incidents.jsonl");
  ws.incidents().ingest_stream(inc, policy);
  std::ifstream pol(testing::fixtures_dir() / "policies.jsonl");
  ws.policies().ingest_stream(pol, policy);
  ws.refresh();
  ws.build_indexes();
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { ingest(ws); }

  Response call(const std::string& method, const std::string& path, const std::string& body = "",
                std::map<std::string, std::string> headers = {}, std::map<std::string, std::string> query = {}) {
    if (!headers.count("authorization")) headers["authorization"] = "Bearer secret";
    return svc.handle({method, path, std::move(query), std::move(headers), body});
  }

  std::string workplan_body() const { return testing::read_text(testing::fixtures_dir() / "workplan.json"); }

  std::string create_job() {
    const auto r = call("POST", "/workplans", workplan_body());
    EXPECT_EQ(r.status, 201) << r.body;
    return json::parse(r.body).at("job_id").get<std::string>();
  }

  TempDir tmp;
  app::Workspace ws{fixture_config(tmp.path() / "data")};
  Service svc{ws, ServiceOptions{"secret", false}};
};

TEST_F(ServiceTest, HealthIsOpenAndOthersNeedToken) {
  const auto h = svc.handle({"GET", "/healthz", {}, {}, ""});
  EXPECT_EQ(h.status, 200);
  EXPECT_TRUE(json::parse(h.body).at("index_ready").get<bool>());
  const auto denied = call("GET", "/jobs/job-0001-00000000", "", {{"authorization", "Bearer wrong"}});
  EXPECT_EQ(denied.status, 401);
  EXPECT_EQ(json::parse(denied.body).at("code"), "validation");
}

TEST_F(ServiceTest, RequestIdEchoedOrGenerated) {
  const auto a = call("GET", "/healthz", "", {{"x-request-id", "abc-1"}});
  EXPECT_EQ(a.headers.at("X-Request-Id"), "abc-1");
  const auto b = call("GET", "/nowhere");
  EXPECT_EQ(b.status, 404);
  EXPECT_FALSE(b.headers.at("X-Request-Id").empty());
}

TEST_F(ServiceTest, WorkplanToReportInEveryFormat) {
  const auto id = create_job();
  const auto status = json::parse(call("GET", "/jobs/" + id).body);
  EXPECT_EQ(status.at("stage"), "reported");
  EXPECT_EQ(status.at("report_versions"), json::array({1}));

  const auto trace = json::parse(call("GET", "/jobs/" + id + "/trace").body);
  EXPECT_FALSE(trace.at("trace").empty());

  const auto report = call("GET", "/reports/" + id);
  ASSERT_EQ(report.status, 200);
  EXPECT_EQ(json::parse(report.body).at("report_id"), id + ".v1");
  EXPECT_EQ(report.body, testing::read_text(ws.jobs().reports_dir() / (id + ".v1.report.json")));
  for (const char* f : {"markdown", "html"}) {
    const auto r = call("GET", "/reports/" + id, "", {}, {{"format", f}});
    ASSERT_EQ(r.status, 200) << f;
    EXPECT_FALSE(json::parse(r.body).at("content").get<std::string>().empty());
  }
  EXPECT_EQ(call("GET", "/reports/" + id, "", {}, {{"version", "2"}}).status, 404);
  EXPECT_EQ(call("GET", "/reports/" + id, "", {}, {{"version", "x"}}).status, 422);
  EXPECT_EQ(call("GET", "/reports/" + id, "", {}, {{"format", "pdf"}}).status, 422);
  EXPECT_EQ(call("GET", "/reports/job-9999-00000000").status, 404);
}

TEST_F(ServiceTest, EventsAndQuery) {
  const auto e = call("GET", "/events/INC-001");
  ASSERT_EQ(e.status, 200);
  EXPECT_EQ(json::parse(e.body).at("doc_id"), "INC-001");
  EXPECT_EQ(call("GET", "/events/INC-404").status, 404);

  // Under the mock embedder only near-verbatim text clears theta.
  const auto& chunk = ws.incidents().chunks().front();
  const auto q = call("POST", "/query", json{{"text", chunk.text}, {"k", 3}}.dump());
  ASSERT_EQ(q.status, 200) << q.body;
  const auto docs = json::parse(q.body).at("documents");
  ASSERT_FALSE(docs.empty()) << q.body;
  EXPECT_EQ(docs[0].at("doc_id"), chunk.doc_id);
  EXPECT_LE(docs.size(), 3u);
  EXPECT_EQ(call("POST", "/query", R"({"text":"x","k":0})").status, 422);
  EXPECT_EQ(call("POST", "/query", "not json").status, 422);
}

TEST_F(ServiceTest, FeedbackAddsVersionAndValidates) {
  const auto id = create_job();
  const auto body = testing::read_text(testing::fixtures_dir() / "feedback_exclude.json");
  const auto r = call("POST", "/jobs/" + id + "/feedback", body);
  ASSERT_EQ(r.status, 200) << r.body;
  const auto status = json::parse(r.body);
  EXPECT_EQ(status.at("report_versions"), json::array({1, 2}));
  EXPECT_EQ(status.at("excluded_docs"), json::array({"INC-001"}));

  auto bad = json::parse(body);
  bad["event_grades"]["INC-002"] = 3;
  EXPECT_EQ(call("POST", "/jobs/" + id + "/feedback", bad.dump()).status, 422);
  EXPECT_EQ(call("POST", "/jobs/job-9999-00000000/feedback", body).status, 404);
}

TEST_F(ServiceTest, IdempotencyKeyReplaysOrConflicts) {
  const auto first = call("POST", "/workplans", workplan_body(), {{"idempotency-key", "k1"}});
  ASSERT_EQ(first.status, 201);
  const auto again = call("POST", "/workplans", workplan_body(), {{"idempotency-key", "k1"}});
  EXPECT_EQ(again.status, 201);
  EXPECT_EQ(again.body, first.body);
  EXPECT_EQ(ws.jobs().list().size(), 1u);

  auto other = json::parse(workplan_body());
  other["event_name"] = "different plan";
  const auto clash = call("POST", "/workplans", other.dump(), {{"idempotency-key", "k1"}});
  EXPECT_EQ(clash.status, 409);
  EXPECT_EQ(json::parse(clash.body).at("code"), "conflict");
}

TEST(ServiceNoIndex, WorkplanReportsBackendUnavailable) {
  TempDir tmp;
  app::Workspace ws(fixture_config(tmp.path()));
  Service svc(ws, ServiceOptions{"", false});
  const auto r = svc.handle({"POST", "/workplans", {}, {}, testing::read_text(testing::fixtures_dir() / "workplan.json")});
  EXPECT_EQ(r.status, http_status(ErrorCode::backend_unavailable));
  EXPECT_EQ(json::parse(r.body).at("code"), "backend_unavailable");
  EXPECT_TRUE(ws.jobs().list().empty());
}

TEST(ServiceHttp, BackgroundServerOverSocket) {
  TempDir tmp;
  app::Workspace ws(fixture_config(tmp.path()));
  ingest(ws);
  Service svc(ws, ServiceOptions{"tok", true});
  const int port = svc.start_background();
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  client.set_bearer_token_auth("tok");

  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_TRUE(health->has_header("X-Request-Id"));

  auto created = client.Post("/workplans", testing::read_text(testing::fixtures_dir() / "workplan.json"),
                             "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201) << created->body;
  const auto id = json::parse(created->body).at("job_id").get<std::string>();
  svc.wait_idle();

  auto status = client.Get("/jobs/" + id);
  ASSERT_TRUE(status);
  EXPECT_EQ(json::parse(status->body).at("stage"), "reported");
  auto report = client.Get("/reports/" + id + "?format=markdown");
  ASSERT_TRUE(report);
  EXPECT_EQ(report->status, 200);

  httplib::Client anonymous("127.0.0.1", port);
  auto denied = anonymous.Get("/jobs/" + id);
  ASSERT_TRUE(denied);
  EXPECT_EQ(denied->status, 401);
  svc.stop();
}

}  // namespace
}  // namespace harness::service
