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

#include "harness/orchestrator/job_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"

namespace harness::orchestrator {
namespace fs = std::filesystem;

namespace {

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::internal, "write failed for " + path.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

void append_line(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw Error(ErrorCode::internal, "cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, line + "\n", path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

}  // namespace

JobState fold(const std::vector<json>& events) {
  JobState job;
  bool created = false;
  for (const auto& ev : events) {
    const auto type = ev.at("type").get<std::string>();
    if (type == "created") {
      if (created) throw Error(ErrorCode::internal, "job log has two created events");
      created = true;
      job.job_id = ev.at("job_id").get<std::string>();
      job.workplan = corpus::document_from_json(ev.at("workplan"));
      job.stage = Stage::created;
      continue;
    }
    if (!created) throw Error(ErrorCode::internal, "job log does not start with a created event");
    if (type == "trace") {
      job.trace.push_back(trace_entry_from_json(ev.at("entry")));
    } else if (type == "stage") {
      const Stage s = parse_stage(ev.at("stage").get<std::string>());
      if (job.stage == Stage::failed || s != next_stage(job.stage)) {
        throw Error(ErrorCode::internal, "job " + job.job_id + " log has stage " + std::string(to_string(s)) +
                                             " out of order after " + std::string(to_string(job.stage)));
      }
      job.outputs[s] = ev.at("output");
      job.stage = s;
      if (s == Stage::reported) job.report_versions.push_back(ev.at("output").at("version").get<int>());
    } else if (type == "failed") {
      job.failed_at = parse_stage(ev.at("stage").get<std::string>());
      job.error = ev.at("error").get<std::string>();
      job.stage = Stage::failed;
    } else if (type == "feedback") {
      job.feedback.push_back(feedback_from_json(ev.at("feedback")));
      if (job.feedback.back().approved) job.approved = true;
    } else if (type == "rerun") {
      const Stage keep = parse_stage(ev.at("resume_after").get<std::string>());
      for (auto it = job.outputs.begin(); it != job.outputs.end();) {
        it = stage_rank(it->first) > stage_rank(keep) ? job.outputs.erase(it) : std::next(it);
      }
      job.stage = keep;
      job.excluded_docs = ev.at("excluded_docs").get<std::set<std::string>>();
    } else {
      throw Error(ErrorCode::internal, "unknown job event type '" + type + "'");
    }
  }
  if (!created) throw Error(ErrorCode::internal, "empty job log");
  return job;
}

JobStore::JobStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "jobs");
  fs::create_directories(reports_dir());
  fs::create_directories(qrels_path().parent_path());
}

fs::path JobStore::log_path(const std::string& job_id) const {
  if (job_id.empty() || job_id.find_first_of("/\\.") != std::string::npos) {
    throw NotFoundError("no job '" + job_id + "'");
  }
  return root_ / "jobs" / (job_id + ".jsonl");
}

std::mutex& JobStore::lock_for(const std::string& job_id) const {
  std::lock_guard guard(map_mutex_);
  auto& slot = locks_[job_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string JobStore::allocate_id(const corpus::Document& workplan) {
  std::lock_guard guard(id_mutex_);
  const std::string digest = json_digest(corpus::to_json(workplan)).substr(0, 8);
  std::size_t n = 1;
  for (const auto& entry : fs::directory_iterator(root_ / "jobs")) {
    if (entry.path().extension() == ".jsonl") ++n;
  }
  for (;; ++n) {
    char id[64];
    std::snprintf(id, sizeof id, "job-%04zu-%s", n, digest.c_str());
    const auto path = log_path(id);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd >= 0) {
      ::close(fd);
      return id;
    }
    if (errno != EEXIST) throw Error(ErrorCode::internal, "cannot create " + path.string() + ": " + std::strerror(errno));
  }
}

void JobStore::append(const std::string& job_id, const json& event) {
  const auto path = log_path(job_id);
  std::lock_guard guard(lock_for(job_id));
  if (!fs::exists(path)) throw NotFoundError("no job '" + job_id + "'");
  append_line(path, canonical_dump(event));
}

std::vector<json> JobStore::events(const std::string& job_id) const {
  const auto path = log_path(job_id);
  std::string content;
  {
    std::lock_guard guard(lock_for(job_id));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("no job '" + job_id + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    content = buf.str();
  }
  std::vector<json> out;
  std::size_t start = 0;
  // Only newline-terminated lines are committed.
  for (std::size_t nl = content.find('\n'); nl != std::string::npos; nl = content.find('\n', start)) {
    if (nl > start) out.push_back(json::parse(content.substr(start, nl - start)));
    start = nl + 1;
  }
  if (out.empty()) throw NotFoundError("job '" + job_id + "' has no committed events");
  return out;
}

JobState JobStore::load(const std::string& job_id) const { return fold(events(job_id)); }

bool JobStore::exists(const std::string& job_id) const {
  try {
    return fs::exists(log_path(job_id));
  } catch (const NotFoundError&) {
    return false;
  }
}

std::vector<std::string> JobStore::list() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "jobs")) {
    if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void JobStore::append_qrels(const std::string& job_id, const std::map<std::string, int>& grades) {
  if (grades.empty()) return;
  std::string lines;
  for (const auto& [doc, grade] : grades) lines += job_id + " 0 " + doc + " " + std::to_string(grade) + "\n";
  lines.pop_back();
  std::lock_guard guard(qrels_mutex_);
  append_line(qrels_path(), lines);
}

HazardControlDb::HazardControlDb(fs::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
}

std::map<std::string, std::vector<agents::HazardControlPair>> HazardControlDb::read_locked() const {
  std::map<std::string, std::vector<agents::HazardControlPair>> out;
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    auto& pairs = out[j.at("provenance_doc_id").get<std::string>()];
    for (const auto& p : j.at("pairs")) pairs.push_back(agents::pair_from_json(p));
  }
  return out;
}

void HazardControlDb::put(const std::string& provenance, const std::vector<agents::HazardControlPair>& pairs) {
  std::lock_guard guard(mutex_);
  auto all = read_locked();
  all[provenance] = pairs;
  const fs::path tmp = file_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto& [prov, ps] : all) {
      json arr = json::array();
      for (const auto& p : ps) arr.push_back(agents::to_json(p));
      out << canonical_dump({{"provenance_doc_id", prov}, {"pairs", arr}}) << "\n";
    }
    if (!out) throw Error(ErrorCode::internal, "cannot write " + tmp.string());
  }
  fs::rename(tmp, file_);
}

std::vector<agents::HazardControlPair> HazardControlDb::get(const std::string& provenance) const {
  std::lock_guard guard(mutex_);
  auto all = read_locked();
  auto it = all.find(provenance);
  return it == all.end() ? std::vector<agents::HazardControlPair>{} : it->second;
}

std::map<std::string, std::vector<agents::HazardControlPair>> HazardControlDb::all() const {
  std::lock_guard guard(mutex_);
  return read_locked();
}

}  // namespace harness::orchestrator
