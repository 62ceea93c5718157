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

#include "harness/common/error.hpp"
#include "harness/reporting/report.hpp"
#include "test_support.hpp"

namespace harness::reporting {
namespace {

using harness::testing::FixturePipeline;
using harness::testing::TempDir;

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto id = orch.create_job(testing::fixture_workplan());
    job = orch.run_job(id, p.deps());
    ASSERT_EQ(job.stage, orchestrator::Stage::reported) << job.error;
    report = testing::read_json(report_path(store.reports_dir(), id, 1, Format::json));
  }

  TempDir tmp;
  orchestrator::JobStore store{tmp.path()};
  orchestrator::Orchestrator orch = testing::make_orchestrator(store);
  FixturePipeline p;
  orchestrator::JobState job;
  json report;
};

TEST_F(ReportTest, HasEverySectionAndValidates) {
  for (auto key : kSectionKeys) EXPECT_TRUE(report.at("sections").contains(std::string(key))) << key;
  EXPECT_TRUE(validate_report(report, p.incidents, &p.policies).empty());
  EXPECT_EQ(report.at("sections").at("overall_risk_profile"), recount_risk_profile(report.at("sections")));
}

TEST_F(ReportTest, AssembleIsDeterministic) {
  const auto narrative = narrative_from_json(report.at("narrative"));
  auto reported = job;
  reported.outputs.erase(orchestrator::Stage::reported);
  const auto a = assemble(reported, 1, p.incidents, narrative);
  const auto b = assemble(reported, 1, p.incidents, narrative);
  EXPECT_EQ(canonical_dump(a), canonical_dump(b));
  EXPECT_EQ(canonical_dump(a), canonical_dump(report));
  EXPECT_NE(assemble(reported, 2, p.incidents, narrative).at("report_id"), a.at("report_id"));
}

TEST_F(ReportTest, ValidationCatchesTampering) {
  auto bad_count = report;
  bad_count["sections"]["overall_risk_profile"]["max_risk"] = 99;
  EXPECT_FALSE(validate_report(bad_count, p.incidents, &p.policies).empty());

  auto bad_event = report;
  bad_event["sections"]["retrieved_events"]["events"][0]["doc_id"] = "INC-404";
  EXPECT_FALSE(validate_report(bad_event, p.incidents, &p.policies).empty());

  auto missing = report;
  missing["sections"].erase("policy_mappings");
  EXPECT_FALSE(validate_report(missing, p.incidents, &p.policies).empty());

  auto& modes = report["sections"]["critical_failures"]["failure_modes"];
  ASSERT_FALSE(modes.empty());
  auto bad_risk = report;
  bad_risk["sections"]["critical_failures"]["failure_modes"][0]["risk"] = 1;
  EXPECT_FALSE(validate_report(bad_risk, p.incidents, &p.policies).empty());

  auto& matches = report["sections"]["policy_mappings"]["matches"];
  if (!matches.empty()) {
    auto bad_excerpt = report;
    bad_excerpt["sections"]["policy_mappings"]["matches"][0]["excerpt"] = "words the policy never says";
    EXPECT_FALSE(validate_report(bad_excerpt, p.incidents, &p.policies).empty());
  }
}

TEST_F(ReportTest, RenderingsShowCanonicalFields) {
  EXPECT_EQ(render(report, Format::json), canonical_dump_pretty(report));
  const auto md = render(report, Format::markdown);
  const auto html = render(report, Format::html);
  for (const auto* text : {&md, &html}) {
    EXPECT_NE(text->find(report.at("report_id").get<std::string>()), std::string::npos);
    for (const auto& e : report["sections"]["retrieved_events"]["events"]) {
      EXPECT_NE(text->find(e.at("doc_id").get<std::string>()), std::string::npos);
    }
  }
  EXPECT_EQ(md.rfind("# ", 0), 0u);
  EXPECT_NE(html.find("<html"), std::string::npos);
  EXPECT_EQ(html.find("<script"), std::string::npos);
}

TEST_F(ReportTest, VersionsAreNeverOverwritten) {
  const auto files = write_report_files(report, store.reports_dir());  // identical bytes: accepted
  EXPECT_EQ(files.size(), 3u);
  auto changed = report;
  changed["title"] = "something else";
  EXPECT_THROW(write_report_files(changed, store.reports_dir()), ConflictError);
  EXPECT_EQ(testing::read_json(files[0]), report);
}

TEST(Format, ParseAndPaths) {
  EXPECT_EQ(parse_format("md"), Format::markdown);
  EXPECT_EQ(parse_format("markdown"), Format::markdown);
  EXPECT_EQ(parse_format("html"), Format::html);
  EXPECT_THROW(parse_format("pdf"), ValidationError);
  EXPECT_EQ(report_path("/r", "job-1", 3, Format::html), std::filesystem::path("/r/job-1.v3.report.html"));
}

TEST(Html, EscapesContent) {
  TempDir tmp;
  orchestrator::JobStore store(tmp.path());
  auto orch = testing::make_orchestrator(store);
  FixturePipeline p;
  auto wp = testing::fixture_workplan();
  wp.event_name = "<script>alert(1)</script> & more";
  const auto job = orch.run_job(orch.create_job(wp), p.deps());
  ASSERT_EQ(job.stage, orchestrator::Stage::reported) << job.error;
  const auto html = testing::read_text(report_path(store.reports_dir(), job.job_id, 1, Format::html));
  EXPECT_EQ(html.find("<script>"), std::string::npos);
  EXPECT_NE(html.find("&lt;script&gt;"), std::string::npos);
}

TEST(Narrative, FlagsParagraphsWithoutContextCitations) {
  FixturePipeline p;
  retrieval::ContextSet context;
  context.chunks.push_back({"INC-001#0000", "INC-001", 0.9, std::nullopt});
  llm::FixtureGenerator llm(json{{"rules", {{{"response", "Cited [INC-001].\n\nNot in context [INC-002].\n\nBare."}}}}});
  const auto n = generate_narrative(json{{"sections", json::object()}}, context, p.incidents, llm);
  ASSERT_EQ(n.paragraphs.size(), 3u);
  EXPECT_EQ(n.paragraphs[0].citations, std::vector<std::string>{"INC-001"});
  EXPECT_FALSE(n.paragraphs[0].flagged);
  EXPECT_TRUE(n.paragraphs[1].citations.empty());
  EXPECT_TRUE(n.paragraphs[1].flagged);
  EXPECT_TRUE(n.paragraphs[2].flagged);
  EXPECT_EQ(narrative_from_json(to_json(n)), n);
  EXPECT_THROW(generate_narrative(json::object(), retrieval::ContextSet{}, p.incidents, llm), ValidationError);
}

TEST(Narrative, BackendFailureStillProducesReport) {
  TempDir tmp;
  orchestrator::JobStore store(tmp.path());
  auto orch = testing::make_orchestrator(store);
  json t = testing::read_json(testing::fixtures_dir() / "transcript.json");
  for (auto& rule : t["rules"]) {
    if (rule["template"] == "narrative") rule["response"] = {{"error", "unavailable"}};
  }
  FixturePipeline p(t);
  const auto job = orch.run_job(orch.create_job(testing::fixture_workplan()), p.deps());
  ASSERT_EQ(job.stage, orchestrator::Stage::reported) << job.error;
  const auto report = testing::read_json(report_path(store.reports_dir(), job.job_id, 1, Format::json));
  EXPECT_FALSE(report.at("narrative").at("available").get<bool>());
}

}  // namespace
}  // namespace harness::reporting
