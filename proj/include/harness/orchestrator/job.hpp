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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/common/time.hpp"
#include "harness/corpus/document.hpp"

namespace harness::orchestrator {

// Declared order; `failed` is terminal and sits outside the sequence.
enum class Stage {
  created,
  summarized,
  retrieved,
  hazards_extracted,
  coverage_done,
  fmea_done,
  policies_done,
  reported,
  failed
};

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view text);
// Position in the sequence; throws for `failed`.
int stage_rank(Stage s);
// The stage that follows `s`; throws for reported and failed.
Stage next_stage(Stage s);

enum class TraceStatus { ok, retried, failed };

std::string_view to_string(TraceStatus s);
TraceStatus parse_trace_status(std::string_view text);

struct TraceEntry {
  std::string agent_name;
  Stage stage = Stage::created;  // the stage this entry works towards
  int attempt = 1;
  Timestamp started_at;
  Timestamp ended_at;
  std::string input_digest;
  std::string output_digest;  // empty unless status is ok
  TraceStatus status = TraceStatus::ok;
  std::string note;
  std::vector<std::string> prompt_digests;  // template digests used by the attempt

  bool operator==(const TraceEntry&) const = default;
};

json to_json(const TraceEntry& e);
TraceEntry trace_entry_from_json(const json& j);

enum class EditOp { add, remove, modify };

struct HazardEdit {
  EditOp op = EditOp::add;
  std::string hazard;                      // target (remove/modify) or new text (add)
  std::optional<std::string> replacement;  // modify only
  std::optional<std::string> control;      // add only, optional

  bool operator==(const HazardEdit&) const = default;
};

struct SmeFeedback {
  std::string job_id;
  std::map<std::string, int> event_grades;  // doc_id -> 0, 1 or 2
  std::vector<HazardEdit> hazard_edits;
  bool approved = false;
  std::string author;
  Timestamp at;

  bool operator==(const SmeFeedback&) const = default;
};

json to_json(const HazardEdit& e);
HazardEdit hazard_edit_from_json(const json& j);
json to_json(const SmeFeedback& f);
// Checks shape and the grade scale; throws ValidationError.
SmeFeedback feedback_from_json(const json& j);

struct JobState {
  std::string job_id;
  corpus::Document workplan;
  Stage stage = Stage::created;
  std::optional<Stage> failed_at;  // the stage that could not be reached
  std::string error;
  std::map<Stage, json> outputs;   // output of every completed stage
  std::vector<TraceEntry> trace;
  std::vector<SmeFeedback> feedback;
  std::vector<int> report_versions;
  std::set<std::string> excluded_docs;  // graded 0 by an SME
  bool approved = false;

  const json* output(Stage s) const;
  int latest_version() const { return report_versions.empty() ? 0 : report_versions.back(); }
  // doc_id -> most recent grade over all feedback.
  std::map<std::string, int> grades() const;
};

// Status view used by the CLI and the service.
json status_json(const JobState& job);

}  // namespace harness::orchestrator
