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

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "harness/app/workspace.hpp"
#include "harness/common/canonical_json.hpp"
#include "harness/common/error.hpp"

namespace httplib {
class Server;
}

namespace harness::service {

// The error body of every non-2xx response.
struct ApiError {
  ErrorCode code = ErrorCode::internal;
  std::string message;
  std::string detail;

  json to_json() const;
};

int http_status(ErrorCode code);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // names lower-cased
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // always JSON
  std::map<std::string, std::string> headers;
};

struct ServiceOptions {
  std::string bearer_token;  // empty: no authentication
  bool run_async = true;     // false runs jobs inside the request (tests)
};

// HTTP facade over a Workspace. handle() is transport independent; serve()
// binds it to a socket.
//
//   POST /workplans             create a job from a work plan and run it
//   GET  /jobs/{id}             job status
//   GET  /jobs/{id}/trace       trace entries
//   POST /jobs/{id}/feedback    SME feedback (may rerun and add a version)
//   GET  /reports/{job_id}      ?version=<k>&format=json|markdown|html
//   GET  /events/{doc_id}       one incident record
//   POST /query                 ad-hoc retrieval {"text", "k"?}
//   GET  /healthz
//
// State-changing requests honour an Idempotency-Key header; responses echo
// X-Request-Id (generated when absent).
class Service {
 public:
  Service(app::Workspace& workspace, ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  // Blocks until stop(). Throws Error when the port cannot be bound.
  void serve(const std::string& host, int port);
  // Binds an ephemeral port and serves on a background thread; returns the
  // port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

  // Joins every background job run.
  void wait_idle();

 private:
  Response route(const Request& request);
  Response create_workplan(const Request& request);
  Response post_feedback(const std::string& job_id, const Request& request);
  Response get_report(const std::string& job_id, const Request& request);
  Response post_query(const Request& request);
  Response health();

  void launch(const std::string& job_id);
  void remember(const std::string& key, const json& record);
  std::optional<json> recall(const std::string& key);
  void load_idempotency();
  void install_routes();

  app::Workspace& ws_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::mutex jobs_mutex_;
  std::vector<std::thread> job_threads_;
  std::mutex idem_mutex_;
  std::map<std::string, json> idempotency_;
  std::filesystem::path idem_file_;
  std::atomic<unsigned long long> request_counter_{0};
};

}  // namespace harness::service
