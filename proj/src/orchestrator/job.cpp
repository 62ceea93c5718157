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

#include "harness/orchestrator/job.hpp"

#include <array>

#include "harness/common/error.hpp"

namespace harness::orchestrator {
namespace {

constexpr std::array<std::string_view, 9> kStageNames = {
    "created", "summarized", "retrieved", "hazards_extracted", "coverage_done",
    "fmea_done", "policies_done", "reported", "failed"};

constexpr std::array<std::string_view, 3> kStatusNames = {"ok", "retried", "failed"};
constexpr std::array<std::string_view, 3> kEditNames = {"add", "remove", "modify"};

template <typename Enum, std::size_t N>
Enum parse_enum(const std::array<std::string_view, N>& names, std::string_view text, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  throw ValidationError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }
Stage parse_stage(std::string_view text) { return parse_enum<Stage>(kStageNames, text, "stage"); }

int stage_rank(Stage s) {
  if (s == Stage::failed) throw ValidationError("failed has no position in the stage sequence");
  return static_cast<int>(s);
}

Stage next_stage(Stage s) {
  if (s == Stage::reported || s == Stage::failed) {
    throw ValidationError("no stage follows " + std::string(to_string(s)));
  }
  return static_cast<Stage>(static_cast<int>(s) + 1);
}

std::string_view to_string(TraceStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }
TraceStatus parse_trace_status(std::string_view text) {
  return parse_enum<TraceStatus>(kStatusNames, text, "trace status");
}

json to_json(const TraceEntry& e) {
  return {{"agent_name", e.agent_name},
          {"stage", to_string(e.stage)},
          {"attempt", e.attempt},
          {"started_at", format_timestamp(e.started_at)},
          {"ended_at", format_timestamp(e.ended_at)},
          {"input_digest", e.input_digest},
          {"output_digest", e.output_digest},
          {"status", to_string(e.status)},
          {"note", e.note},
          {"prompt_digests", e.prompt_digests}};
}

TraceEntry trace_entry_from_json(const json& j) {
  TraceEntry e;
  e.agent_name = j.at("agent_name").get<std::string>();
  e.stage = parse_stage(j.at("stage").get<std::string>());
  e.attempt = j.at("attempt").get<int>();
  e.started_at = parse_timestamp(j.at("started_at").get<std::string>());
  e.ended_at = parse_timestamp(j.at("ended_at").get<std::string>());
  e.input_digest = j.at("input_digest").get<std::string>();
  e.output_digest = j.at("output_digest").get<std::string>();
  e.status = parse_trace_status(j.at("status").get<std::string>());
  e.note = j.value("note", "");
  e.prompt_digests = j.value("prompt_digests", std::vector<std::string>{});
  return e;
}

json to_json(const HazardEdit& e) {
  json j = {{"op", kEditNames[static_cast<std::size_t>(e.op)]}, {"hazard", e.hazard}};
  if (e.replacement) j["replacement"] = *e.replacement;
  if (e.control) j["control"] = *e.control;
  return j;
}

HazardEdit hazard_edit_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("hazard edit must be an object");
  HazardEdit e;
  e.op = parse_enum<EditOp>(kEditNames, j.at("op").get<std::string>(), "hazard edit op");
  e.hazard = j.at("hazard").get<std::string>();
  if (e.hazard.empty()) throw ValidationError("hazard edit needs a hazard");
  if (auto r = j.find("replacement"); r != j.end() && !r->is_null()) e.replacement = r->get<std::string>();
  if (auto c = j.find("control"); c != j.end() && !c->is_null()) e.control = c->get<std::string>();
  if (e.op == EditOp::modify && (!e.replacement || e.replacement->empty())) {
    throw ValidationError("modify edit needs a non-empty replacement");
  }
  return e;
}

json to_json(const SmeFeedback& f) {
  json edits = json::array();
  for (const auto& e : f.hazard_edits) edits.push_back(to_json(e));
  return {{"job_id", f.job_id},
          {"event_grades", f.event_grades},
          {"hazard_edits", edits},
          {"approved", f.approved},
          {"author", f.author},
          {"at", format_timestamp(f.at)}};
}

SmeFeedback feedback_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("feedback must be a JSON object");
  SmeFeedback f;
  try {
    f.job_id = j.value("job_id", "");
    if (auto g = j.find("event_grades"); g != j.end()) {
      if (!g->is_object()) throw ValidationError("event_grades must map doc ids to grades");
      for (const auto& [doc, grade] : g->items()) {
        if (!grade.is_number_integer()) throw ValidationError("grade for '" + doc + "' must be an integer");
        const auto value = grade.get<long long>();
        if (value < 0 || value > 2) {
          throw ValidationError("grade for '" + doc + "' is " + std::to_string(value) + "; grades are 0, 1 or 2");
        }
        f.event_grades[doc] = static_cast<int>(value);
      }
    }
    if (auto e = j.find("hazard_edits"); e != j.end()) {
      if (!e->is_array()) throw ValidationError("hazard_edits must be an array");
      for (const auto& edit : *e) f.hazard_edits.push_back(hazard_edit_from_json(edit));
    }
    f.approved = j.value("approved", false);
    f.author = j.value("author", "");
    if (auto at = j.find("at"); at != j.end() && at->is_string()) f.at = parse_timestamp(at->get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed feedback: ") + e.what());
  }
  return f;
}

const json* JobState::output(Stage s) const {
  auto it = outputs.find(s);
  return it == outputs.end() ? nullptr : &it->second;
}

std::map<std::string, int> JobState::grades() const {
  std::map<std::string, int> out;
  for (const auto& f : feedback) {
    for (const auto& [doc, grade] : f.event_grades) out[doc] = grade;
  }
  return out;
}

json status_json(const JobState& job) {
  json completed = json::array();
  for (const auto& [stage, _] : job.outputs) completed.push_back(to_string(stage));
  json j = {{"job_id", job.job_id},
            {"workplan_id", job.workplan.doc_id},
            {"stage", to_string(job.stage)},
            {"completed_stages", completed},
            {"report_versions", job.report_versions},
            {"excluded_docs", job.excluded_docs},
            {"approved", job.approved},
            {"feedback_count", job.feedback.size()},
            {"trace_entries", job.trace.size()}};
  if (job.failed_at) {
    j["failed_at"] = to_string(*job.failed_at);
    j["error"] = job.error;
  }
  return j;
}

}  // namespace harness::orchestrator
