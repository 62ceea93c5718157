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

#include <gtest/gtest.h>

#include <random>

#include "harness/agents/agents.hpp"
#include "harness/common/error.hpp"
#include "test_support.hpp"

namespace harness::agents {
namespace {

using harness::testing::FixturePipeline;

TEST(Summarize, ParsesFixtureEnvelope) {
  FixturePipeline p;
  llm::CallLog log;
  const auto s = summarize(testing::fixture_workplan(), *p.llm, &log);
  EXPECT_FALSE(s.scope.empty());
  EXPECT_EQ(s.controls_mentioned.size(), 3u);
  EXPECT_EQ(summary_from_json(to_json(s)), s);
  EXPECT_EQ(log.repairs, 0);
}

TEST(Summarize, DeduplicatesComponentsIgnoringCase) {
  llm::FixtureGenerator llm(json{{"rules",
                                  {{{"response",
                                     {{"scope", "s"},
                                      {"components", {"Breaker", "breaker", "crane"}},
                                      {"operational_context", "c"},
                                      {"controls_mentioned", json::array()}}}}}}});
  const auto s = summarize(testing::fixture_workplan(), llm);
  EXPECT_EQ(s.components, (std::vector<std::string>{"Breaker", "crane"}));
}

TEST(Summarize, UnusableReplyAfterRepairIsAgentError) {
  llm::FixtureGenerator llm(json{{"rules", {{{"response", {{"scope", 3}}}}}}});
  EXPECT_THROW(summarize(testing::fixture_workplan(), llm), AgentError);
}

TEST(ExtractByRule, HazardWithOptionalControl) {
  const auto pairs = extract_pairs_by_rule(
      "Crew noted. Hazard: arc flash at 480V; control: remote racking. Then hazard: dropped load. e.g. nothing",
      "INC-9");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].hazard, "arc flash at 480V");
  EXPECT_EQ(pairs[0].control, "remote racking");
  EXPECT_EQ(pairs[0].provenance_doc_id, "INC-9");
  EXPECT_EQ(pairs[1].hazard, "dropped load");
  EXPECT_FALSE(pairs[1].control.has_value());
}

TEST(ExtractByRule, PeriodsInsideValuesKept) {
  const auto pairs = extract_pairs_by_rule("HAZARD: fall from 1.5 m platform; Control: guardrail. Later text.", "X");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].hazard, "fall from 1.5 m platform");
  EXPECT_EQ(pairs[0].control, "guardrail");
}

TEST(Extract, BackendFailureLeavesRuleResults) {
  llm::FixtureGenerator llm(json{{"rules", {{{"response", {{"error", "unavailable"}}}}}}});
  llm::CallLog log;
  const auto pairs = extract_pairs("Hazard: pinch point; control: guard.", "D", llm, &log);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_FALSE(log.notes.empty());
}

TEST(Extract, MergesBackendPairsWithoutDuplicates) {
  llm::FixtureGenerator llm(json{
      {"rules",
       {{{"response",
          {{"pairs", {{{"hazard", "Pinch point"}, {"control", "Guard"}, {"confidence", 0.8}},
                      {{"hazard", "noise"}, {"control", nullptr}, {"confidence", 0.7}}}}}}}}}});
  const auto pairs = extract_pairs("Hazard: pinch point; control: guard.", "D", llm);
  EXPECT_EQ(pairs.size(), 2u);
  EXPECT_EQ(distinct_hazards(pairs).size(), 2u);
  for (const auto& p : pairs) EXPECT_EQ(p.provenance_doc_id, "D");
}

TEST(DistinctHazards, FirstOccurrenceWinsCaseInsensitively) {
  std::vector<HazardControlPair> pairs{{"Arc Flash", {}, "a", 1}, {"arc flash", "x", "b", 1}, {"noise", {}, "c", 1}};
  EXPECT_EQ(distinct_hazards(pairs), (std::vector<std::string>{"Arc Flash", "noise"}));
}

TEST(Coverage, PartitionsEveryHazard) {
  index::MockEmbedder embedder(64);
  std::mt19937_64 rng(8);
  const std::vector<std::string> words{"arc", "flash", "crane", "lift", "backfeed", "fall", "guard", "sling", "ppe"};
  auto phrase = [&] {
    std::string s;
    for (int i = 0, n = 1 + rng() % 4; i < n; ++i) s += words[rng() % words.size()] + " ";
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> hazards, controls;
    for (int i = 0, n = rng() % 6; i < n; ++i) hazards.push_back(phrase() + std::to_string(i));
    for (int i = 0, n = rng() % 4; i < n; ++i) controls.push_back(phrase());
    const auto r = match_coverage(hazards, controls, embedder);
    EXPECT_EQ(r.covered.size() + r.weak.size() + r.uncovered.size(), hazards.size());
    for (const auto& m : r.covered) EXPECT_GE(m.match_score, 0.6);
    for (const auto& m : r.weak) {
      EXPECT_GE(m.match_score, 0.4);
      EXPECT_LT(m.match_score, 0.6);
    }
    if (controls.empty()) {
      EXPECT_EQ(r.uncovered.size(), hazards.size());
    }
    EXPECT_EQ(canonical_dump(to_json(coverage_from_json(to_json(r)))), canonical_dump(to_json(r)));
  }
}

TEST(Fmea, FixtureModesSortedByRisk) {
  FixturePipeline p;
  const auto summary = summarize(testing::fixture_workplan(), *p.llm);
  const std::vector<HazardControlPair> pairs{{"arc flash during breaker racking", "remote racking", "INC-001", 0.9}};
  llm::CallLog log;
  const auto modes = run_fmea(summary, distinct_hazards(pairs), pairs, "WP-001", *p.llm, 12, &log);
  ASSERT_EQ(modes.size(), 3u);
  EXPECT_EQ(modes[0].risk, 15);
  EXPECT_TRUE(modes[0].critical);
  EXPECT_EQ(modes[0].sources, std::vector<std::string>{"INC-001"});
  EXPECT_EQ(modes[1].risk, 10);
  EXPECT_FALSE(modes[1].critical);
  EXPECT_EQ(modes[2].risk, 6);
  for (const auto& m : modes) {
    EXPECT_EQ(m.risk, m.severity * m.likelihood);
    EXPECT_EQ(failure_mode_from_json(to_json(m)), m);
  }
  EXPECT_EQ(log.calls, 3);
}

TEST(Fmea, ThresholdMovesCriticalFlag) {
  FixturePipeline p;
  const auto summary = summarize(testing::fixture_workplan(), *p.llm);
  const auto modes = run_fmea(summary, {}, {}, "WP-001", *p.llm, 6);
  for (const auto& m : modes) EXPECT_TRUE(m.critical);
  EXPECT_THROW(run_fmea(summary, {}, {}, "WP-001", *p.llm, 26), ValidationError);
}

TEST(Fmea, OutOfScaleSeverityIsRepairedOrRejected) {
  json t = testing::read_json(testing::fixtures_dir() / "transcript.json");
  for (auto& rule : t["rules"]) {
    if (rule["template"] == "fmea_effects") rule["response"]["analyses"][0]["severity"] = 7;
  }
  json bad_repair;
  for (const auto& rule : t["rules"]) {
    if (rule["template"] == "fmea_effects") bad_repair = {{"template", "repair"}, {"response", rule["response"]}};
  }
  t["rules"].push_back(bad_repair);
  llm::FixtureGenerator llm(t);
  const auto summary = summarize(testing::fixture_workplan(), llm);
  EXPECT_THROW(run_fmea(summary, {}, {}, "WP-001", llm), AgentError);
}

TEST(Policy, MatchesCarryVerbatimExcerpts) {
  FixturePipeline p;
  const std::vector<PolicySubject> subjects{{"mitigation:0.0", "remote racking device and arc rated PPE for breaker racking"},
                                            {"hazard:1", "zzz unrelated qqq"}};
  const auto a = match_policies(subjects, *p.policy_index, p.embedder);
  ASSERT_FALSE(a.matches.empty());
  for (const auto& m : a.matches) {
    EXPECT_GE(m.sim, kDefaultPolicyThreshold);
    const auto* doc = p.policies.find(m.policy_id);
    ASSERT_NE(doc, nullptr);
    EXPECT_NE(doc->body.find(m.excerpt), std::string::npos);
  }
  EXPECT_EQ(a.unmapped, std::vector<std::string>{"hazard:1"});
}

TEST(Policy, EmptyIndexLeavesEverythingUnmapped) {
  index::MockEmbedder embedder(64);
  const auto a = match_policies({{"hazard:0", "arc flash"}}, PolicyIndex{}, embedder);
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmapped.size(), 1u);
}

TEST(Policy, FromDocument) {
  corpus::Document d;
  d.doc_id = "POL-1";
  d.event_name = "Title";
  d.summary = "s";
  d.body = "b";
  d.origin = "external";
  const auto pd = policy_from_document(d);
  EXPECT_EQ(pd.policy_id, "POL-1");
  EXPECT_EQ(pd.origin, "external");
}

}  // namespace
}  // namespace harness::agents
