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

#include <set>

#include "harness/agents/agents.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"
#include "harness/retrieval/smart_retrieval.hpp"

namespace harness::agents {
namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  for (const auto& x : j.at(key)) {
    auto s = corpus::normalize(x.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> dedupe_ci(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : items) {
    if (seen.insert(corpus::ascii_lower(s)).second) out.push_back(s);
  }
  return out;
}

void check_summary_envelope(const json& j) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  if (!j.at("scope").is_string() || corpus::normalize(j.at("scope").get<std::string>()).empty()) {
    throw ValidationError("'scope' must be a non-empty string");
  }
  if (!j.at("operational_context").is_string()) throw ValidationError("'operational_context' must be a string");
  for (const char* key : {"components", "controls_mentioned"}) {
    const auto& list = j.at(key);
    if (!list.is_array()) throw ValidationError(std::string("'") + key + "' must be an array");
    for (const auto& x : list) {
      if (!x.is_string()) throw ValidationError(std::string("'") + key + "' must hold strings");
    }
  }
}

}  // namespace

json to_json(const WorkPlanSummary& s) {
  return {{"scope", s.scope},
          {"components", s.components},
          {"operational_context", s.operational_context},
          {"controls_mentioned", s.controls_mentioned}};
}

WorkPlanSummary summary_from_json(const json& j) {
  WorkPlanSummary s;
  s.scope = corpus::normalize(j.at("scope").get<std::string>());
  s.components = dedupe_ci(string_list(j, "components"));
  s.operational_context = corpus::normalize(j.at("operational_context").get<std::string>());
  s.controls_mentioned = dedupe_ci(string_list(j, "controls_mentioned"));
  if (s.scope.empty()) throw ValidationError("summary scope is empty");
  return s;
}

WorkPlanSummary summarize(const corpus::Document& workplan, const llm::Generator& llm, llm::CallLog* log) {
  const std::string text = corpus::normalize(workplan.primary_text());
  if (text.empty() && corpus::normalize(workplan.summary).empty()) throw ValidationError("empty work plan");
  auto request = llm::render_prompt("summarize", {{"workplan_id", workplan.doc_id},
                                                  {"title", corpus::normalize(workplan.event_name)},
                                                  {"text", retrieval::canonical_text(workplan)}});
  json reply = llm::call_json(llm, request, "summarize", check_summary_envelope, log);
  return summary_from_json(reply);
}

}  // namespace harness::agents
