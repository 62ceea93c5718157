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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/corpus/corpus_store.hpp"
#include "harness/corpus/document.hpp"
#include "harness/index/embedding.hpp"
#include "harness/index/vector_index.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"

namespace harness::agents {

// ---------------------------------------------------------------------------
// Work plan summarization

struct WorkPlanSummary {
  std::string scope;
  std::vector<std::string> components;  // deduplicated case-insensitively
  std::string operational_context;
  std::vector<std::string> controls_mentioned;

  bool operator==(const WorkPlanSummary&) const = default;
};

json to_json(const WorkPlanSummary& s);
WorkPlanSummary summary_from_json(const json& j);

// Prompts with the fixed template and parses the strict JSON envelope, with
// one repair retry. Throws AgentError when the reply stays unusable.
WorkPlanSummary summarize(const corpus::Document& workplan, const llm::Generator& llm, llm::CallLog* log = nullptr);

// ---------------------------------------------------------------------------
// Hazard-control extraction and coverage

struct HazardControlPair {
  std::string hazard;
  std::optional<std::string> control;
  std::string provenance_doc_id;
  double confidence = 0.0;

  bool operator==(const HazardControlPair&) const = default;
};

json to_json(const HazardControlPair& p);
HazardControlPair pair_from_json(const json& j);

// Literal "hazard: X; control: Y" patterns, case-insensitive. The control
// part is optional.
std::vector<HazardControlPair> extract_pairs_by_rule(const std::string& text, const std::string& provenance);

// Backend extraction merged with the rule scan. Backend failures are noted
// and leave the rule results; nothing here is fatal.
std::vector<HazardControlPair> extract_pairs(const std::string& text, const std::string& provenance,
                                             const llm::Generator& llm, llm::CallLog* log = nullptr);

// Hazard texts, first occurrence wins, compared case-insensitively.
std::vector<std::string> distinct_hazards(const std::vector<HazardControlPair>& pairs);

struct CoverageThresholds {
  double covered = 0.6;
  double weak = 0.4;
};

struct CoverageMatch {
  std::string hazard;
  std::string control;
  double match_score = 0.0;

  bool operator==(const CoverageMatch&) const = default;
};

struct CoverageReport {
  std::vector<CoverageMatch> covered;
  std::vector<std::string> uncovered;
  std::vector<CoverageMatch> weak;

  bool operator==(const CoverageReport&) const = default;
};

json to_json(const CoverageReport& r);
CoverageReport coverage_from_json(const json& j);

// Pairs every hazard with its best-cosine plan control (first control wins a
// tie). Score >= covered threshold is covered, >= weak threshold is weak,
// anything lower (or no controls at all) is uncovered. Scores are clamped to
// [0, 1].
CoverageReport match_coverage(const std::vector<std::string>& hazards, const std::vector<std::string>& plan_controls,
                              const index::Embedder& embedder, const CoverageThresholds& thresholds = {});

// ---------------------------------------------------------------------------
// FMEA

struct FailureMode {
  std::string description;
  std::vector<std::string> causes;
  std::vector<std::string> effects;
  int severity = 1;    // 1-5
  int likelihood = 1;  // 1-5
  int risk = 1;        // severity * likelihood
  bool critical = false;
  std::vector<std::string> mitigations;
  std::string hazard;                 // hazard the mode derives from, may be empty
  std::vector<std::string> sources;   // provenance doc ids

  bool operator==(const FailureMode&) const = default;
};

json to_json(const FailureMode& m);
FailureMode failure_mode_from_json(const json& j);

inline constexpr int kDefaultCriticalThreshold = 12;

// Identify modes, analyze causes, then effects with severity, likelihood and
// mitigations: three sequential backend calls. Risk and the critical flag
// are computed locally; the result is sorted by risk descending.
// `pairs` supplies provenance for modes that name their hazard.
std::vector<FailureMode> run_fmea(const WorkPlanSummary& summary, const std::vector<std::string>& hazards,
                                  const std::vector<HazardControlPair>& pairs, const std::string& workplan_id,
                                  const llm::Generator& llm, int critical_threshold = kDefaultCriticalThreshold,
                                  llm::CallLog* log = nullptr);

// ---------------------------------------------------------------------------
// Policy alignment

struct PolicyDocument {
  std::string policy_id;
  std::string title;
  std::string body;
  std::string origin;  // sbms | external
};

PolicyDocument policy_from_document(const corpus::Document& doc);

// Policy chunks and their embeddings, built with the incident backend.
class PolicyIndex {
 public:
  PolicyIndex() = default;
  PolicyIndex(const corpus::CorpusStore& policies, index::VectorIndex vectors);

  const corpus::CorpusStore* store() const { return store_; }
  const index::VectorIndex& vectors() const { return vectors_; }
  bool empty() const { return store_ == nullptr || store_->empty(); }

 private:
  const corpus::CorpusStore* store_ = nullptr;
  index::VectorIndex vectors_;
};

struct PolicySubject {
  std::string ref;   // e.g. "hazard:3", "mode:0", "mitigation:0.1"
  std::string text;
};

struct PolicyMatch {
  std::string subject_ref;
  std::string policy_id;
  double sim = 0.0;
  std::string excerpt;  // verbatim substring of the policy body

  bool operator==(const PolicyMatch&) const = default;
};

struct PolicyAlignment {
  std::vector<PolicyMatch> matches;
  std::vector<std::string> unmapped;  // subject refs without a match
  std::vector<std::string> warnings;
};

json to_json(const PolicyMatch& m);

inline constexpr double kDefaultPolicyThreshold = 0.55;

// For each subject: every policy whose best chunk has cosine >= threshold,
// with that chunk's text as excerpt, sorted by sim descending (ties by
// policy id). Subjects without a match are listed as unmapped.
PolicyAlignment match_policies(const std::vector<PolicySubject>& subjects, const PolicyIndex& policies,
                               const index::Embedder& embedder, double threshold = kDefaultPolicyThreshold);

}  // namespace harness::agents
