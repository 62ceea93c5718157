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

#include <algorithm>
#include <set>

#include "harness/agents/agents.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::agents {
namespace {

std::vector<std::string> clean_strings(const json& a) {
  std::vector<std::string> out;
  for (const auto& x : a) {
    auto s = corpus::normalize(x.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

void require_string_array(const json& a, const std::string& what, bool non_empty) {
  if (!a.is_array()) throw ValidationError(what + " must be an array");
  std::size_t usable = 0;
  for (const auto& x : a) {
    if (!x.is_string()) throw ValidationError(what + " must hold strings");
    if (!corpus::normalize(x.get<std::string>()).empty()) ++usable;
  }
  if (non_empty && usable == 0) throw ValidationError(what + " must not be empty");
}

int scale_value(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ValidationError(what + " must be an integer");
  const auto n = v.get<long long>();
  if (n < 1 || n > 5) throw ValidationError(what + " must be between 1 and 5");
  return static_cast<int>(n);
}

std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  }
  return out;
}

}  // namespace

json to_json(const FailureMode& m) {
  return {{"description", m.description}, {"causes", m.causes},         {"effects", m.effects},
          {"severity", m.severity},       {"likelihood", m.likelihood}, {"risk", m.risk},
          {"critical", m.critical},       {"mitigations", m.mitigations}, {"hazard", m.hazard},
          {"sources", m.sources}};
}

FailureMode failure_mode_from_json(const json& j) {
  FailureMode m;
  m.description = j.at("description").get<std::string>();
  m.causes = j.at("causes").get<std::vector<std::string>>();
  m.effects = j.at("effects").get<std::vector<std::string>>();
  m.severity = j.at("severity").get<int>();
  m.likelihood = j.at("likelihood").get<int>();
  m.risk = j.at("risk").get<int>();
  m.critical = j.at("critical").get<bool>();
  m.mitigations = j.at("mitigations").get<std::vector<std::string>>();
  m.hazard = j.value("hazard", "");
  m.sources = j.value("sources", std::vector<std::string>{});
  return m;
}

std::vector<FailureMode> run_fmea(const WorkPlanSummary& summary, const std::vector<std::string>& hazards,
                                  const std::vector<HazardControlPair>& pairs, const std::string& workplan_id,
                                  const llm::Generator& llm, int critical_threshold, llm::CallLog* log) {
  if (critical_threshold < 1 || critical_threshold > 25) {
    throw ValidationError("critical threshold must be within 1..25");
  }

  // Stage 1: failure modes.
  auto identify = llm::render_prompt(
      "fmea_identify", {{"summary", canonical_dump_pretty(to_json(summary))},
                        {"hazards", hazards.empty() ? std::string("(none found)\n") : numbered(hazards)}});
  json modes_reply = llm::call_json(llm, identify, "fmea", [](const json& j) {
    const auto& modes = j.at("failure_modes");
    if (!modes.is_array()) throw ValidationError("'failure_modes' must be an array");
    for (const auto& m : modes) {
      if (!m.is_object() || !m.at("description").is_string() ||
          corpus::normalize(m.at("description").get<std::string>()).empty()) {
        throw ValidationError("every failure mode needs a non-empty description");
      }
      if (m.contains("hazard") && !m.at("hazard").is_string() && !m.at("hazard").is_null()) {
        throw ValidationError("'hazard' must be a string");
      }
    }
  }, log);

  std::vector<FailureMode> modes;
  std::set<std::string> seen;
  for (const auto& m : modes_reply.at("failure_modes")) {
    FailureMode fm;
    fm.description = corpus::normalize(m.at("description").get<std::string>());
    if (!seen.insert(corpus::ascii_lower(fm.description)).second) continue;
    if (m.contains("hazard") && m.at("hazard").is_string()) fm.hazard = corpus::normalize(m.at("hazard").get<std::string>());
    modes.push_back(std::move(fm));
  }
  if (modes.empty()) {
    if (log) log->note("fmea: no failure modes identified");
    return modes;
  }
  std::vector<std::string> descriptions;
  for (const auto& m : modes) descriptions.push_back(m.description);
  const std::size_t n = modes.size();

  // Stage 2: causes.
  auto causes_req = llm::render_prompt("fmea_causes", {{"modes", numbered(descriptions)}});
  json causes_reply = llm::call_json(llm, causes_req, "fmea", [n](const json& j) {
    const auto& causes = j.at("causes");
    if (!causes.is_array() || causes.size() != n) {
      throw ValidationError("'causes' must hold exactly " + std::to_string(n) + " entries");
    }
    for (const auto& c : causes) require_string_array(c, "each cause list", true);
  }, log);
  for (std::size_t i = 0; i < n; ++i) modes[i].causes = clean_strings(causes_reply.at("causes")[i]);

  // Stage 3: effects, severity, likelihood, mitigations.
  std::string listing;
  for (std::size_t i = 0; i < n; ++i) {
    listing += std::to_string(i + 1) + ". " + modes[i].description + "\n   causes: ";
    for (std::size_t c = 0; c < modes[i].causes.size(); ++c) listing += (c ? "; " : "") + modes[i].causes[c];
    listing += "\n";
  }
  auto effects_req = llm::render_prompt("fmea_effects", {{"modes", listing}});
  json effects_reply = llm::call_json(llm, effects_req, "fmea", [n, critical_threshold](const json& j) {
    const auto& analyses = j.at("analyses");
    if (!analyses.is_array() || analyses.size() != n) {
      throw ValidationError("'analyses' must hold exactly " + std::to_string(n) + " entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = analyses[i];
      const std::string at = "analysis " + std::to_string(i + 1);
      require_string_array(a.at("effects"), at + " effects", true);
      const int risk = scale_value(a.at("severity"), at + " severity") * scale_value(a.at("likelihood"), at + " likelihood");
      require_string_array(a.at("mitigations"), at + " mitigations", risk >= critical_threshold);
    }
  }, log);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = effects_reply.at("analyses")[i];
    auto& m = modes[i];
    m.effects = clean_strings(a.at("effects"));
    m.severity = a.at("severity").get<int>();
    m.likelihood = a.at("likelihood").get<int>();
    m.risk = m.severity * m.likelihood;
    m.critical = m.risk >= critical_threshold;
    m.mitigations = clean_strings(a.at("mitigations"));

    std::set<std::string> sources;
    if (!m.hazard.empty()) {
      const auto key = corpus::ascii_lower(m.hazard);
      for (const auto& p : pairs) {
        if (corpus::ascii_lower(p.hazard) == key) sources.insert(p.provenance_doc_id);
      }
    }
    if (sources.empty()) sources.insert(workplan_id);
    m.sources.assign(sources.begin(), sources.end());
  }

  std::stable_sort(modes.begin(), modes.end(), [](const FailureMode& a, const FailureMode& b) {
    if (a.risk != b.risk) return a.risk > b.risk;
    return a.description < b.description;
  });
  return modes;
}

}  // namespace harness::agents
