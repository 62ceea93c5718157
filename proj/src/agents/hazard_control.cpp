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

constexpr double kRuleConfidence = 0.5;

std::string trim_punct(std::string s) {
  s = corpus::normalize(s);
  while (!s.empty() && (s.back() == ',' || s.back() == ':' || s.back() == ';' || s.back() == '.')) s.pop_back();
  return corpus::normalize(s);
}

// End of a pattern value: the first ';', '.', newline or the next marker.
std::size_t value_end(const std::string& lower, std::size_t from) {
  std::size_t end = lower.size();
  for (char stop : {';', '\n'}) end = std::min(end, lower.find(stop, from) == std::string::npos ? end : lower.find(stop, from));
  // A period ends the value only when followed by whitespace or the end, so
  // "e.g." or "1.5 m" stay intact.
  for (std::size_t p = lower.find('.', from); p != std::string::npos && p < end; p = lower.find('.', p + 1)) {
    if (p + 1 == lower.size() || lower[p + 1] == ' ') {
      end = p;
      break;
    }
  }
  for (const char* marker : {"hazard:", "control:"}) {
    auto m = lower.find(marker, from);
    if (m != std::string::npos) end = std::min(end, m);
  }
  return end;
}

std::string pair_key(const std::string& hazard, const std::optional<std::string>& control) {
  return corpus::ascii_lower(hazard) + "\x1f" + (control ? corpus::ascii_lower(*control) : std::string());
}

}  // namespace

json to_json(const HazardControlPair& p) {
  return {{"hazard", p.hazard},
          {"control", p.control ? json(*p.control) : json(nullptr)},
          {"provenance_doc_id", p.provenance_doc_id},
          {"confidence", round6(p.confidence)}};
}

HazardControlPair pair_from_json(const json& j) {
  HazardControlPair p;
  p.hazard = j.at("hazard").get<std::string>();
  if (!j.at("control").is_null()) p.control = j.at("control").get<std::string>();
  p.provenance_doc_id = j.at("provenance_doc_id").get<std::string>();
  p.confidence = j.at("confidence").get<double>();
  return p;
}

std::vector<HazardControlPair> extract_pairs_by_rule(const std::string& text, const std::string& provenance) {
  std::vector<HazardControlPair> out;
  const std::string lower = corpus::ascii_lower(text);
  const std::string hazard_marker = "hazard:";
  const std::string control_marker = "control:";
  for (std::size_t pos = lower.find(hazard_marker); pos != std::string::npos;
       pos = lower.find(hazard_marker, pos + hazard_marker.size())) {
    const std::size_t start = pos + hazard_marker.size();
    const std::size_t end = value_end(lower, start);
    std::string hazard = trim_punct(text.substr(start, end - start));
    if (hazard.empty()) continue;

    std::optional<std::string> control;
    std::size_t after = end;
    while (after < lower.size() && (lower[after] == ';' || lower[after] == ' ' || lower[after] == ',')) ++after;
    if (lower.compare(after, control_marker.size(), control_marker) == 0) {
      const std::size_t cstart = after + control_marker.size();
      const std::size_t cend = value_end(lower, cstart);
      auto c = trim_punct(text.substr(cstart, cend - cstart));
      if (!c.empty()) control = std::move(c);
    }
    out.push_back({std::move(hazard), std::move(control), provenance, kRuleConfidence});
  }
  return out;
}

std::vector<HazardControlPair> extract_pairs(const std::string& text, const std::string& provenance,
                                             const llm::Generator& llm, llm::CallLog* log) {
  const std::string normalized = corpus::normalize(text);
  if (normalized.empty()) throw ValidationError("cannot extract pairs from empty text");

  std::vector<HazardControlPair> out;
  std::set<std::string> seen;
  try {
    auto request = llm::render_prompt("extract_pairs", {{"doc_id", provenance}, {"text", normalized}});
    json reply = llm::call_json(llm, request, "extract_pairs", [](const json& j) {
      if (!j.at("pairs").is_array()) throw ValidationError("'pairs' must be an array");
    }, log);
    for (const auto& item : reply.at("pairs")) {
      if (!item.is_object() || !item.contains("hazard") || !item.at("hazard").is_string() ||
          !item.contains("confidence") || !item.at("confidence").is_number()) {
        if (log) log->note("extract_pairs: dropped a pair without hazard or confidence");
        continue;
      }
      HazardControlPair p;
      p.hazard = corpus::normalize(item.at("hazard").get<std::string>());
      if (p.hazard.empty()) continue;
      if (auto c = item.find("control"); c != item.end() && c->is_string()) {
        auto control = corpus::normalize(c->get<std::string>());
        if (!control.empty()) p.control = std::move(control);
      }
      p.confidence = std::clamp(item.at("confidence").get<double>(), 0.0, 1.0);
      p.provenance_doc_id = provenance;
      if (seen.insert(pair_key(p.hazard, p.control)).second) out.push_back(std::move(p));
    }
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    if (log) log->note(std::string("extract_pairs: backend extraction unavailable for ") + provenance + " (" +
                       e.what() + ")");
  }
  for (auto& p : extract_pairs_by_rule(normalized, provenance)) {
    if (seen.insert(pair_key(p.hazard, p.control)).second) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> distinct_hazards(const std::vector<HazardControlPair>& pairs) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    if (seen.insert(corpus::ascii_lower(p.hazard)).second) out.push_back(p.hazard);
  }
  return out;
}

json to_json(const CoverageReport& r) {
  auto matches = [](const std::vector<CoverageMatch>& ms) {
    json a = json::array();
    for (const auto& m : ms) a.push_back({{"hazard", m.hazard}, {"control", m.control}, {"match_score", round6(m.match_score)}});
    return a;
  };
  return {{"covered", matches(r.covered)}, {"weak", matches(r.weak)}, {"uncovered", r.uncovered}};
}

CoverageReport coverage_from_json(const json& j) {
  CoverageReport r;
  auto matches = [](const json& a) {
    std::vector<CoverageMatch> out;
    for (const auto& m : a) {
      out.push_back({m.at("hazard").get<std::string>(), m.at("control").get<std::string>(),
                     m.at("match_score").get<double>()});
    }
    return out;
  };
  r.covered = matches(j.at("covered"));
  r.weak = matches(j.at("weak"));
  r.uncovered = j.at("uncovered").get<std::vector<std::string>>();
  return r;
}

CoverageReport match_coverage(const std::vector<std::string>& hazards, const std::vector<std::string>& plan_controls,
                              const index::Embedder& embedder, const CoverageThresholds& thresholds) {
  CoverageReport report;
  if (hazards.empty()) return report;
  if (plan_controls.empty()) {
    report.uncovered = hazards;
    return report;
  }
  const auto hazard_vecs = embedder.embed_batch(hazards);
  const auto control_vecs = embedder.embed_batch(plan_controls);
  for (std::size_t h = 0; h < hazards.size(); ++h) {
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t c = 0; c < plan_controls.size(); ++c) {
      const double s = index::cosine(hazard_vecs[h], control_vecs[c]);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    const double score = std::clamp(best_score, 0.0, 1.0);
    if (score >= thresholds.covered) {
      report.covered.push_back({hazards[h], plan_controls[best], score});
    } else if (score >= thresholds.weak) {
      report.weak.push_back({hazards[h], plan_controls[best], score});
    } else {
      report.uncovered.push_back(hazards[h]);
    }
  }
  return report;
}

}  // namespace harness::agents
