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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "harness/agents/agents.hpp"
#include "harness/common/canonical_json.hpp"
#include "harness/orchestrator/job.hpp"

namespace harness::orchestrator {

// Rebuilds a job from its event log. Unknown event types are rejected.
JobState fold(const std::vector<json>& events);

// Append-only event log, one JSON Lines file per job under <root>/jobs.
// Appends to one job are serialized; a reader only sees complete lines.
class JobStore {
 public:
  explicit JobStore(std::filesystem::path root);

  // "job-<n>-<first 8 hex of the work plan digest>", n counting up from 1 in
  // this store. Creates the (empty) log file.
  std::string allocate_id(const corpus::Document& workplan);

  void append(const std::string& job_id, const json& event);
  std::vector<json> events(const std::string& job_id) const;  // NotFoundError
  JobState load(const std::string& job_id) const;
  bool exists(const std::string& job_id) const;
  std::vector<std::string> list() const;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path reports_dir() const { return root_ / "reports"; }
  // TREC qrels ("<job_id> 0 <doc_id> <grade>") of every SME grade received.
  std::filesystem::path qrels_path() const { return root_ / "qrels" / "feedback.qrels.txt"; }
  void append_qrels(const std::string& job_id, const std::map<std::string, int>& grades);

 private:
  std::filesystem::path log_path(const std::string& job_id) const;
  std::mutex& lock_for(const std::string& job_id) const;

  std::filesystem::path root_;
  mutable std::mutex map_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::mutex id_mutex_;
  std::mutex qrels_mutex_;
};

// Extracted pairs accumulated across jobs, one record per provenance
// document; a later extraction of the same document replaces the earlier
// one. Stored as sorted JSON Lines, rewritten atomically.
class HazardControlDb {
 public:
  explicit HazardControlDb(std::filesystem::path file);

  void put(const std::string& provenance, const std::vector<agents::HazardControlPair>& pairs);
  std::vector<agents::HazardControlPair> get(const std::string& provenance) const;
  std::map<std::string, std::vector<agents::HazardControlPair>> all() const;

 private:
  std::map<std::string, std::vector<agents::HazardControlPair>> read_locked() const;

  std::filesystem::path file_;
  mutable std::mutex mutex_;
};

}  // namespace harness::orchestrator
