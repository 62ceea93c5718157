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
#include <sstream>

#include "harness/common/error.hpp"
#include "harness/eval/eval.hpp"
#include "test_support.hpp"

namespace harness::eval {
namespace {

Qrels qrels_from(const std::string& text) {
  std::istringstream in(text);
  return Qrels::parse(in);
}

RunFile run_from(const std::string& text) {
  std::istringstream in(text);
  return RunFile::parse(in);
}

TEST(Qrels, ParsesAndRejectsConflicts) {
  const auto q = qrels_from("# comment\n\nq1 0 A 2\nq1 0 B 1\nq1 0 A 2\nq2 0 C 0\n");
  EXPECT_EQ(q.size(), 3u);
  EXPECT_EQ(q.grade("q1", "A"), 2);
  EXPECT_FALSE(q.grade("q1", "Z").has_value());
  EXPECT_TRUE(q.is_relevant("q1", "B", RelevanceRule::grade_at_least_1));
  EXPECT_FALSE(q.is_relevant("q1", "B", RelevanceRule::grade_2));
  EXPECT_EQ(q.relevant_count("q2", RelevanceRule::grade_at_least_1), 0u);
  EXPECT_THROW(qrels_from("q1 0 A 2\nq1 0 A 1\n"), ValidationError);
  EXPECT_THROW(qrels_from("q1 0 A 3\n"), ValidationError);
  EXPECT_THROW(qrels_from("q1 0 A\n"), ValidationError);
  std::ostringstream out;
  q.write(out);
  EXPECT_EQ(qrels_from(out.str()).rows(), q.rows());
  EXPECT_EQ(parse_relevance_rule("eq2"), RelevanceRule::grade_2);
  EXPECT_THROW(parse_relevance_rule("gt0"), ValidationError);
}

TEST(RunFile, ParsesAndChecksRanking) {
  const auto r = run_from("q1 Q0 A 1 0.9 t\nq1 Q0 B 2 0.9 t\nq2 Q0 C 1 0.1 t\n");
  EXPECT_EQ(r.queries(), (std::vector<std::string>{"q1", "q2"}));
  EXPECT_EQ(r.rows("q1").size(), 2u);
  EXPECT_EQ(r.tag(), "t");
  EXPECT_THROW(r.rows("q9"), NotFoundError);
  EXPECT_THROW(run_from("q1 Q0 A 2 0.9 t\n"), ValidationError);
  EXPECT_THROW(run_from("q1 Q0 A 1 0.5 t\nq1 Q0 B 2 0.9 t\n"), ValidationError);
  EXPECT_THROW(run_from("q1 Q0 A 1 0.9 t\nq1 Q0 A 2 0.5 t\n"), ValidationError);
  EXPECT_THROW(run_from("q1 Q0 A one 0.9 t\n"), ValidationError);
  std::ostringstream out;
  r.write(out);
  EXPECT_EQ(run_from(out.str()).rows("q1"), r.rows("q1"));
}

TEST(Metrics, PrecisionRecallF1) {
  const auto q = qrels_from("q 0 A 2\nq 0 B 1\nq 0 C 0\nq 0 D 2\n");
  const auto r = run_from("q Q0 A 1 5 t\nq Q0 C 2 4 t\nq Q0 X 3 3 t\nq Q0 B 4 2 t\nq Q0 Y 5 1 t\n");
  EXPECT_DOUBLE_EQ(precision_at_k(r, "q", q, 5), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(*recall_at_k(r, "q", q, 5), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(precision_at_k(r, "q", q, 5, RelevanceRule::grade_2), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(*recall_at_k(r, "q", q, 5, RelevanceRule::grade_2), 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(f1(0.4, 2.0 / 3.0), 0.5);
  EXPECT_EQ(f1(0, 0), 0.0);
  EXPECT_THROW(precision_at_k(r, "missing", q, 5), NotFoundError);
}

TEST(Metrics, ShortRunsStillDivideByK) {
  const auto q = qrels_from("q 0 A 1\n");
  const auto r = run_from("q Q0 A 1 1 t\n");
  EXPECT_DOUBLE_EQ(precision_at_k(r, "q", q, 5), 0.2);
  EXPECT_DOUBLE_EQ(*recall_at_k(r, "q", q, 5), 1.0);
}

TEST(Metrics, QueriesWithoutRelevantDocsAreExcluded) {
  const auto q = qrels_from("a 0 A 1\nb 0 B 0\n");
  const auto r = run_from("a Q0 A 1 1 t\nb Q0 B 1 1 t\n");
  EXPECT_FALSE(recall_at_k(r, "b", q, 5).has_value());
  const auto row = evaluate_run(r, q, 5);
  EXPECT_EQ(row.excluded_queries, std::vector<std::string>{"b"});
  EXPECT_EQ(row.per_query.size(), 2u);
  EXPECT_EQ(row.r.n, 1u);
  EXPECT_EQ(row.p.n, 2u);
}

TEST(Metrics, BoundedProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::ostringstream qs, rs;
    for (int d = 0; d < 15; ++d) qs << "q 0 D" << d << " " << rng() % 3 << "\n";
    std::vector<int> docs(20);
    std::iota(docs.begin(), docs.end(), 0);
    std::shuffle(docs.begin(), docs.end(), rng);
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) rs << "q Q0 D" << docs[i] << " " << i + 1 << " " << 100 - i << " t\n";
    const auto q = qrels_from(qs.str());
    const auto r = run_from(rs.str());
    const std::size_t k = 1 + rng() % 10;
    const double p = precision_at_k(r, "q", q, k);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    if (const auto rec = recall_at_k(r, "q", q, k)) {
      EXPECT_GE(*rec, 0.0);
      EXPECT_LE(*rec, 1.0);
      const double f = f1(p, *rec);
      EXPECT_LE(f, std::max(p, *rec) + 1e-15);
      EXPECT_GE(f, std::min(p, *rec) - 1e-15);
    }
  }
}

TEST(Aggregate, PopulationAndSample) {
  const auto a = aggregate({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_DOUBLE_EQ(a.std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(aggregate({1, 2, 3, 4}, false).std, std::sqrt(5.0 / 3.0));
  EXPECT_THROW(aggregate({}), ValidationError);
  EXPECT_THROW(aggregate({1}, false), ValidationError);
  EXPECT_EQ(aggregate({1}).std, 0.0);
  EXPECT_EQ((Aggregate{0.92, 0.0976, 3}).format(), "0.920 ± 0.098");
}

TEST(Pool, RoundRobinDedupedAndCapped) {
  const auto a = run_from("q Q0 A 1 3 t\nq Q0 B 2 2 t\nq Q0 C 3 1 t\n");
  const auto b = run_from("q Q0 B 1 3 u\nq Q0 D 2 2 u\nq Q0 E 3 1 u\n");
  EXPECT_EQ(pool({a, b}, 10, 25).at("q"), (std::vector<std::string>{"A", "B", "D", "C", "E"}));
  EXPECT_EQ(pool({a, b}, 1, 25).at("q"), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(pool({a, b}, 10, 3).at("q"), (std::vector<std::string>{"A", "B", "D"}));
}

TEST(Tables, CsvAndMarkdown) {
  MetricRow row;
  row.variant_tag = "current_best";
  row.p = {0.5, 0.1, 2};
  row.r = {0.25, 0.0, 2};
  row.f1 = {1.0 / 3.0, 0.05, 2};
  const auto csv = metrics_csv({row}, 5);
  EXPECT_EQ(csv,
            "variant,p_at_5_mean,p_at_5_std,r_at_5_mean,r_at_5_std,f1_at_5_mean,f1_at_5_std,queries,excluded_queries\n"
            "current_best,0.500,0.100,0.250,0.000,0.333,0.050,0,0\n");
  const auto md = metrics_markdown({row}, 5);
  EXPECT_NE(md.find("| current_best | 0.500 ± 0.100 | 0.250 ± 0.000 | 0.333 ± 0.050 |"), std::string::npos);
}

json judge_rules(std::vector<json> responses) {
  return {{"rules", {{{"template", "judge_criterion"}, {"responses", responses}},
                     {{"template", "repair"}, {"response", {{"score", 9}, {"justification", "still bad"}}}}}}};
}

TEST(Judge, FiveCriteriaAveraged) {
  std::vector<json> replies;
  for (int s : {4, 3, 4, 5, 3}) replies.push_back({{"score", s}, {"justification", "ok"}});
  llm::FixtureGenerator judge(judge_rules(replies));
  const auto scores = judge_report("report", "plan", judge);
  EXPECT_EQ(scores.scores.size(), 5u);
  EXPECT_EQ(scores.scores.at("clarity"), 4);
  EXPECT_EQ(scores.scores.at("specificity"), 3);
  EXPECT_DOUBLE_EQ(scores.overall(), 3.8);
  EXPECT_DOUBLE_EQ(overall_score({4, 3, 4, 5, 3}), 3.8);
  const auto calls = judge.calls();
  ASSERT_EQ(calls.size(), 5u);
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    EXPECT_NE(calls[i].text.find(std::string(kCriteria[i].definition)), std::string::npos);
  }
  const auto csv = judge_csv({{"job-1", scores}});
  EXPECT_EQ(csv, "report,clarity,completeness,usefulness,accuracy,specificity,overall\njob-1,4,3,4,5,3,3.8\n");
  const auto md = judge_markdown({{"job-1", scores}});
  EXPECT_NE(md.find("| Accuracy | 5.0 |"), std::string::npos);
  EXPECT_NE(md.find("| Overall | 3.8 |"), std::string::npos);
}

TEST(Judge, NonIntegerOrOutOfRangeScoresRejected) {
  for (const json& bad : {json{{"score", 6}}, json{{"score", 3.5}}, json{{"score", "4"}}, json{{"score", 0}}}) {
    llm::FixtureGenerator judge(judge_rules({bad}));
    EXPECT_THROW(judge_report("r", "p", judge), AgentError) << bad.dump();
  }
}

TEST(Benchmark, PerfectRetrievalAndDecoys) {
  auto corpus = std::make_shared<corpus::CorpusStore>(corpus::CorpusStore::in_memory({64, 8}));
  corpus->add(testing::read_docs(testing::fixtures_dir() / "incidents.jsonl"));
  const auto qa = load_qa(testing::fixtures_dir() / "qa.jsonl");
  ASSERT_EQ(qa.size(), 20u);
  int tick = 0;
  auto now = [&] { return std::chrono::steady_clock::time_point(std::chrono::milliseconds(10 * tick++)); };
  const std::vector<BenchmarkBackend> backends{
      {"perfect", [&] { return source_retriever(corpus); }},
      {"broken", []() -> Retriever { throw Error(ErrorCode::backend_unavailable, "down"); }}};
  const auto rows = benchmark_embeddings(qa, backends, extractive_answerer(), containment_judge(), now);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].correctness_pct, 100.0);
  EXPECT_TRUE(rows[0].decoy_questions.empty());
  EXPECT_NEAR(rows[0].avg_query_time_s, 0.01, 1e-12);
  EXPECT_TRUE(rows[1].skipped);
  EXPECT_NE(benchmark_csv(rows).find("broken"), std::string::npos);
}

TEST(Benchmark, ContainmentJudgeFoldsCase) {
  const auto judge = containment_judge();
  QaPair qa{"q", "Arc  flash", "D"};
  EXPECT_EQ(judge(qa, "an ARC FLASH occurred"), 1.0);
  EXPECT_EQ(judge(qa, "a flash"), 0.0);
}

TEST(Metrics, PrecisionSaturatesWhenEverythingIsHighlyRelevant) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::string run_text, qrels_text;
    for (int i = 0; i < 10; ++i) {
      const auto doc = "D" + std::to_string(rng() % 1000) + "x" + std::to_string(i);
      run_text += "q Q0 " + doc + " " + std::to_string(i + 1) + " 1 t\n";
      qrels_text += "q 0 " + doc + " 2\n";
    }
    std::istringstream rs(run_text), qs(qrels_text);
    const auto r = RunFile::parse(rs);
    const auto q = Qrels::parse(qs);
    for (auto rule : {RelevanceRule::grade_at_least_1, RelevanceRule::grade_2}) {
      EXPECT_EQ(precision_at_k(r, "q", q, 5, rule), 1.0);
    }
  }
}

}  // namespace
}  // namespace harness::eval
