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

#include "harness/service/service.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "harness/common/digest.hpp"
#include "harness/corpus/text.hpp"
#include "harness/reporting/report.hpp"

namespace harness::service {
namespace fs = std::filesystem;

namespace {

Response json_response(int status, const json& body) {
  return {status, canonical_dump(body), {}};
}

Response error_response(const ApiError& e) { return json_response(http_status(e.code), e.to_json()); }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '/')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string header(const Request& r, const std::string& name) {
  auto it = r.headers.find(name);
  return it == r.headers.end() ? std::string() : it->second;
}

json parse_body(const Request& r) {
  try {
    return json::parse(r.body);
  } catch (const json::exception& e) {
    throw ValidationError("request body is not valid JSON", e.what());
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFoundError("no file " + p.filename().string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

json ApiError::to_json() const {
  return {{"code", std::string(harness::to_string(code))}, {"message", message}, {"detail", detail}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return 422;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::backend_unavailable: return 503;
    case ErrorCode::internal: return 500;
  }
  return 500;
}

Service::Service(app::Workspace& workspace, ServiceOptions options)
    : ws_(workspace), options_(std::move(options)), idem_file_(workspace.config().data_dir / "idempotency.jsonl") {
  load_idempotency();
}

Service::~Service() {
  stop();
  wait_idle();
}

void Service::load_idempotency() {
  std::ifstream in(idem_file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line);
    idempotency_[j.at("key").get<std::string>()] = j.at("record");
  }
}

void Service::remember(const std::string& key, const json& record) {
  idempotency_[key] = record;
  std::ofstream out(idem_file_, std::ios::app);
  out << canonical_dump({{"key", key}, {"record", record}}) << "\n";
}

std::optional<json> Service::recall(const std::string& key) {
  auto it = idempotency_.find(key);
  if (it == idempotency_.end()) return std::nullopt;
  return it->second;
}

Response Service::handle(const Request& request) {
  std::string request_id = header(request, "x-request-id");
  if (request_id.empty()) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "req-%08llu", ++request_counter_);
    request_id = buf;
  }
  Response response;
  try {
    const bool open = request.method == "GET" && request.path == "/healthz";
    if (!open && !options_.bearer_token.empty() &&
        header(request, "authorization") != "Bearer " + options_.bearer_token) {
      response = json_response(401, ApiError{ErrorCode::validation, "missing or invalid bearer token", ""}.to_json());
    } else {
      response = route(request);
    }
  } catch (const Error& e) {
    response = error_response({e.code(), e.what(), e.detail()});
  } catch (const json::exception& e) {
    response = error_response({ErrorCode::validation, "malformed request", e.what()});
  } catch (const std::exception& e) {
    response = error_response({ErrorCode::internal, "internal error", e.what()});
  }
  response.headers["X-Request-Id"] = request_id;
  response.headers["Content-Type"] = "application/json";
  return response;
}

Response Service::route(const Request& r) {
  const auto parts = split_path(r.path);
  const auto& m = r.method;
  if (parts.size() == 1 && parts[0] == "healthz" && m == "GET") return health();
  if (parts.size() == 1 && parts[0] == "workplans" && m == "POST") return create_workplan(r);
  if (parts.size() == 1 && parts[0] == "query" && m == "POST") return post_query(r);
  if (parts.size() >= 2 && parts[0] == "jobs") {
    const auto& id = parts[1];
    if (!ws_.jobs().exists(id)) throw NotFoundError("no job '" + id + "'");
    if (parts.size() == 2 && m == "GET") return json_response(200, orchestrator::status_json(ws_.jobs().load(id)));
    if (parts.size() == 3 && parts[2] == "trace" && m == "GET") {
      json trace = json::array();
      for (const auto& e : ws_.orchestrator().get_trace(id)) trace.push_back(orchestrator::to_json(e));
      return json_response(200, {{"job_id", id}, {"trace", trace}});
    }
    if (parts.size() == 3 && parts[2] == "feedback" && m == "POST") return post_feedback(id, r);
  }
  if (parts.size() == 2 && parts[0] == "reports" && m == "GET") return get_report(parts[1], r);
  if (parts.size() == 2 && parts[0] == "events" && m == "GET") {
    const auto* doc = ws_.incidents().find(parts[1]);
    if (doc == nullptr) throw NotFoundError("no event '" + parts[1] + "'");
    return json_response(200, corpus::to_json(*doc));
  }
  throw NotFoundError("no route for " + m + " " + r.path);
}

Response Service::health() {
  json j = {{"status", "ok"},
            {"index_ready", ws_.has_index()},
            {"embedder", ws_.config().embedder},
            {"llm", ws_.llm().backend_id()},
            {"incidents", ws_.incidents().documents().size()},
            {"policies", ws_.policies().documents().size()},
            {"jobs", ws_.jobs().list().size()}};
  return json_response(200, j);
}

void Service::launch(const std::string& job_id) {
  auto deps = ws_.deps();
  if (!options_.run_async) {
    ws_.orchestrator().run_job(job_id, deps);
    return;
  }
  std::lock_guard lock(jobs_mutex_);
  job_threads_.emplace_back([this, job_id, deps]() {
    try {
      ws_.orchestrator().run_job(job_id, deps);
    } catch (const std::exception&) {
      // Failures are recorded in the job log; nothing else to report here.
    }
  });
}

Response Service::create_workplan(const Request& r) {
  const json body = parse_body(r);
  const auto workplan = corpus::document_from_json(body);
  const std::string key = header(r, "idempotency-key");
  const std::string digest = json_digest(body);

  std::lock_guard lock(idem_mutex_);
  if (!key.empty()) {
    if (auto prior = recall("workplans:" + key)) {
      if (prior->at("digest") != digest) throw ConflictError("Idempotency-Key reused with a different work plan");
      return {prior->at("status").get<int>(), prior->at("body").get<std::string>(), {}};
    }
  }
  ws_.deps();  // fail fast with backend_unavailable before creating anything
  const auto job_id = ws_.orchestrator().create_job(workplan);
  launch(job_id);
  auto response = json_response(201, {{"job_id", job_id}, {"status_url", "/jobs/" + job_id}});
  if (!key.empty()) remember("workplans:" + key, {{"digest", digest}, {"status", 201}, {"body", response.body}});
  return response;
}

Response Service::post_feedback(const std::string& job_id, const Request& r) {
  const json body = parse_body(r);
  auto feedback = orchestrator::feedback_from_json(body);
  const std::string key = header(r, "idempotency-key");
  const std::string digest = json_digest(body);
  const std::string slot = "feedback:" + job_id + ":" + key;

  std::lock_guard lock(idem_mutex_);
  if (!key.empty()) {
    if (auto prior = recall(slot)) {
      if (prior->at("digest") != digest) throw ConflictError("Idempotency-Key reused with different feedback");
      return {prior->at("status").get<int>(), prior->at("body").get<std::string>(), {}};
    }
  }
  const auto state = ws_.orchestrator().apply_feedback(job_id, std::move(feedback), ws_.deps());
  auto response = json_response(200, orchestrator::status_json(state));
  if (!key.empty()) remember(slot, {{"digest", digest}, {"status", 200}, {"body", response.body}});
  return response;
}

Response Service::get_report(const std::string& job_id, const Request& r) {
  const auto job = ws_.jobs().load(job_id);
  if (job.report_versions.empty()) throw NotFoundError("job " + job_id + " has no report yet");
  int version = job.latest_version();
  if (auto v = r.query.find("version"); v != r.query.end()) {
    try {
      version = std::stoi(v->second);
    } catch (const std::exception&) {
      throw ValidationError("version must be an integer");
    }
    if (std::find(job.report_versions.begin(), job.report_versions.end(), version) == job.report_versions.end()) {
      throw NotFoundError("job " + job_id + " has no report version " + v->second);
    }
  }
  auto format = reporting::Format::json;
  if (auto f = r.query.find("format"); f != r.query.end()) format = reporting::parse_format(f->second);
  const auto bytes = read_file(reporting::report_path(ws_.jobs().reports_dir(), job_id, version, format));
  if (format == reporting::Format::json) return {200, bytes, {}};
  return json_response(200, {{"job_id", job_id},
                             {"version", version},
                             {"format", std::string(reporting::extension(format))},
                             {"content", bytes}});
}

Response Service::post_query(const Request& r) {
  const json body = parse_body(r);
  const auto text = body.at("text").get<std::string>();
  auto config = ws_.config().pipeline.retrieval;
  if (body.contains("k")) {
    const auto k = body.at("k").get<long long>();
    if (k < 1) throw ValidationError("k must be positive");
    config.final_k = static_cast<std::size_t>(k);
  }
  auto deps = ws_.deps();
  retrieval::RetrievalDeps rd{deps.embedder, deps.index, deps.corpus, deps.llm, deps.cross, deps.terms};
  const auto run = retrieval::run_smart(retrieval::Query::from_text(text), rd, config, ws_.config().pipeline.interpret);
  json docs = json::array();
  for (const auto& d : run.documents) docs.push_back({{"doc_id", d.doc_id}, {"score", round6(d.score)}});
  json context = json::array();
  for (const auto& c : run.context.chunks) {
    context.push_back({{"chunk_id", c.chunk_id},
                       {"doc_id", c.doc_id},
                       {"best_query_sim", round6(c.best_query_sim)},
                       {"rerank_score", c.rerank_score ? json(round6(*c.rerank_score)) : json(nullptr)}});
  }
  return json_response(200, {{"query", corpus::normalize(text)},
                             {"decomposition", retrieval::to_string(run.interpretation.reason)},
                             {"documents", docs},
                             {"context", context},
                             {"notes", run.log.notes}});
}

void Service::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  auto bridge = [this](const httplib::Request& hr, httplib::Response& hres) {
    Request r;
    r.method = hr.method;
    r.path = hr.path;
    r.body = hr.body;
    for (const auto& [k, v] : hr.params) r.query[k] = v;
    for (const auto& [k, v] : hr.headers) r.headers[corpus::ascii_lower(k)] = v;
    auto out = handle(r);
    hres.status = out.status;
    for (const auto& [k, v] : out.headers) {
      if (k != "Content-Type") hres.set_header(k, v);
    }
    hres.set_content(out.body, "application/json");
  };
  server_->Get(".*", bridge);
  server_->Post(".*", bridge);
}

void Service::serve(const std::string& host, int port) {
  install_routes();
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::internal, "cannot bind " + host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

int Service::start_background(const std::string& host) {
  install_routes();
  const int port = server_->bind_to_any_port(host);
  if (port <= 0) throw Error(ErrorCode::internal, "cannot bind an ephemeral port on " + host);
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::stop() {
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

void Service::wait_idle() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(jobs_mutex_);
    threads.swap(job_threads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
}

}  // namespace harness::service
