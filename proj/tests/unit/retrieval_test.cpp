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

#include "harness/common/error.hpp"
#include "harness/retrieval/cross_encoder.hpp"
#include "harness/retrieval/keywords.hpp"
#include "harness/retrieval/smart_retrieval.hpp"
#include "test_support.hpp"

namespace harness::retrieval {
namespace {

using harness::testing::FixturePipeline;

json paraphrase_transcript(const std::vector<std::string>& paraphrases) {
  return {{"rules", {{{"template", "expand_paraphrase"}, {"response", {{"paraphrases", paraphrases}}}}}}};
}

TEST(Expand, MatchesFrozenTauOracle) {
  const auto oracle = testing::read_json(testing::oracle_dir() / "tau_expansions.json");
  index::MockEmbedder embedder(oracle.at("dim").get<std::size_t>());
  for (const auto& group : oracle.at("groups")) {
    std::vector<std::string> texts;
    for (const auto& c : group.at("candidates")) texts.push_back(c.at("text"));
    llm::FixtureGenerator llm(paraphrase_transcript(texts));
    RetrievalConfig config;
    config.tau = oracle.at("tau");
    config.expansions_per_subquery = texts.size();
    const auto sq = expand(group.at("parent"), llm, embedder, config);
    EXPECT_EQ(sq.expansions.front().text, group.at("parent").get<std::string>());
    EXPECT_EQ(sq.expansions.front().sim_to_parent, 1.0);
    for (const auto& c : group.at("candidates")) {
      const auto it = std::find_if(sq.expansions.begin(), sq.expansions.end(),
                                   [&](const Expansion& e) { return e.text == c.at("text").get<std::string>(); });
      const bool kept = it != sq.expansions.end();
      EXPECT_EQ(kept, c.at("kept").get<bool>()) << c.at("name");
      if (kept) {
        EXPECT_NEAR(it->sim_to_parent, c.at("cosine").get<double>(), 1e-12) << c.at("name");
      }
    }
  }
}

TEST(Expand, BackendFailureKeepsOnlyOriginal) {
  index::MockEmbedder embedder(64);
  llm::FixtureGenerator llm(json{{"rules", {{{"response", {{"error", "transport"}}}}}}});
  llm::CallLog log;
  const auto sq = expand("arc flash at switchgear", llm, embedder, {}, &log);
  ASSERT_EQ(sq.expansions.size(), 1u);
  EXPECT_FALSE(log.notes.empty());
}

TEST(Expand, LongSubqueriesAreNotParaphrased) {
  index::MockEmbedder embedder(64);
  llm::FixtureGenerator llm(paraphrase_transcript({"a b c"}));
  const auto sq = expand("a b c d", llm, embedder, {}, nullptr, 3);
  EXPECT_EQ(sq.expansions.size(), 1u);
  EXPECT_TRUE(llm.calls().empty());
}

TEST(Interpret, SingleClauseIsAtomic) {
  index::MockEmbedder embedder(64);
  llm::FixtureGenerator llm(json::object());
  const auto qi = interpret(Query::from_text("arc flash while racking"), llm, embedder);
  EXPECT_EQ(qi.reason, DecompositionReason::atomic);
  EXPECT_EQ(qi.subqueries.size(), 1u);
  EXPECT_EQ(count_task_clauses("isolate the feeder and rack out the breaker; then test"), 3u);
}

TEST(Interpret, CompoundQueryIsDecomposedAndValidated) {
  index::MockEmbedder embedder(64);
  const std::string q = "isolate the feeder and rack out the breaker";
  llm::FixtureGenerator good(
      json{{"rules", {{{"response", {{"subqueries", {"isolate the feeder", "rack out the breaker"}}}}}}}});
  const auto qi = interpret(Query::from_text(q), good, embedder);
  EXPECT_EQ(qi.reason, DecompositionReason::compound);
  ASSERT_EQ(qi.subqueries.size(), 2u);

  llm::FixtureGenerator unsupported(
      json{{"rules", {{{"response", {{"subqueries", {"weld the tank", "paint the fence"}}}}}}}});
  const auto fallback = interpret(Query::from_text(q), unsupported, embedder);
  EXPECT_EQ(fallback.reason, DecompositionReason::underspecified);
  ASSERT_EQ(fallback.subqueries.size(), 1u);
  EXPECT_EQ(fallback.subqueries[0].text, q);
}

TEST(Interpret, EmptyQueryRejected) {
  index::MockEmbedder embedder(64);
  llm::FixtureGenerator llm(json::object());
  EXPECT_THROW(interpret(Query::from_text("  "), llm, embedder), ValidationError);
  EXPECT_THROW(interpret(Query::from_docs({}), llm, embedder), ValidationError);
}

RetrievalCandidate cand(std::string chunk, double sim) {
  return {chunk, doc_id_of_chunk(chunk), sim, std::nullopt};
}

TEST(Filter, ThetaIsInclusiveAndOrderPreserved) {
  RetrievalConfig config;
  const auto out = filter({cand("a#0000", 0.9), cand("b#0000", 0.5), cand("c#0000", 0.4999999)}, config);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].chunk_id, "b#0000");
}

TEST(Dedupe, KeepsBestChunkPerDocument) {
  const auto out = dedupe_by_document({cand("a#0001", 0.9), cand("b#0000", 0.8), cand("a#0000", 0.7)});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].chunk_id, "a#0001");
  EXPECT_EQ(doc_id_of_chunk("INC-1#0003"), "INC-1");
  EXPECT_EQ(doc_id_of_chunk("plain"), "plain");
}

class FailingCross final : public CrossEncoder {
 public:
  std::string backend_id() const override { return "failing"; }
  std::vector<double> score(const std::string&, std::span<const Passage>) const override {
    throw TransportError("down");
  }
};

TEST(Rerank, SortsByScoreThenId) {
  JaccardCrossEncoder cross;
  std::map<std::string, std::string> text{{"a#0000", "x y"}, {"b#0000", "arc flash"}, {"c#0000", "arc flash"}};
  const auto out = rerank("arc flash", {cand("a#0000", 0.9), cand("c#0000", 0.6), cand("b#0000", 0.7)}, cross,
                          [&](const std::string& id) { return text.at(id); });
  EXPECT_FALSE(out.fell_back);
  ASSERT_EQ(out.ranked.size(), 3u);
  EXPECT_EQ(out.ranked[0].chunk_id, "b#0000");
  EXPECT_EQ(out.ranked[1].chunk_id, "c#0000");
  EXPECT_EQ(out.ranked[0].rerank_score, 1.0);
}

TEST(Rerank, FallsBackToFirstStageOrder) {
  FailingCross cross;
  const auto out = rerank("q", {cand("b#0000", 0.7), cand("a#0000", 0.7), cand("c#0000", 0.9)}, cross,
                          [](const std::string&) { return std::string("t"); });
  EXPECT_TRUE(out.fell_back);
  ASSERT_EQ(out.ranked.size(), 3u);
  EXPECT_EQ(out.ranked[0].chunk_id, "c#0000");
  EXPECT_EQ(out.ranked[1].chunk_id, "a#0000");
  EXPECT_FALSE(out.ranked[0].rerank_score.has_value());
}

TEST(Jaccard, TokenSets) {
  EXPECT_DOUBLE_EQ(token_jaccard("Arc flash", "arc FLASH"), 1.0);
  EXPECT_DOUBLE_EQ(token_jaccard("a b", "b c"), 1.0 / 3.0);
}

TEST(SelectContext, TakesFinalK) {
  RetrievalConfig config;
  config.final_k = 2;
  const auto ctx = select_context({cand("a#0000", 0.9), cand("b#0000", 0.8), cand("c#0000", 0.7)}, config);
  EXPECT_EQ(ctx.chunks.size(), 2u);
}

TEST(Config, Validates) {
  RetrievalConfig c;
  c.tau = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.final_k = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_EQ(parse_variant("pure_rag"), Variant::pure_rag);
  EXPECT_THROW(parse_variant("magic"), ValidationError);
  EXPECT_EQ(all_variants().size(), 6u);
}

TEST(Keywords, TfidfAndEntitySpans) {
  std::vector<corpus::Document> docs(3);
  docs[0].doc_id = "1";
  docs[0].summary = "crane lift near power lines";
  docs[1].doc_id = "2";
  docs[1].summary = "crane rigging";
  docs[2].doc_id = "3";
  docs[2].summary = "breaker racking";
  TermStatistics stats(docs);
  EXPECT_EQ(stats.df("crane"), 2u);
  EXPECT_DOUBLE_EQ(stats.idf("crane"), std::log(4.0 / 3.0) + 1.0);
  const auto terms = tfidf_terms("breaker breaker crane", stats, 5);
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].term, "breaker");
  EXPECT_EQ(capitalized_spans("work at Substation Twelve near Main Gate. Then Go"),
            (std::vector<std::string>{"Substation Twelve", "Main Gate", "Then Go"}));
  EXPECT_TRUE(is_stopword("the"));
  EXPECT_TRUE(keyword_terms("the to 480 of").empty());
}

TEST(RunSmart, FixtureContextIsFilteredRankedAndBounded) {
  FixturePipeline p;
  RetrievalConfig config;
  config.final_k = 5;
  const auto run = run_smart(Query::from_doc(testing::fixture_workplan()), p.retrieval_deps(), config);
  EXPECT_GE(run.pool_size, run.filtered_size);
  EXPECT_LE(run.context.chunks.size(), 5u);
  EXPECT_FALSE(run.context.chunks.empty());
  std::set<std::string> docs;
  for (const auto& c : run.context.chunks) {
    EXPECT_GE(c.best_query_sim, config.theta);
    EXPECT_TRUE(docs.insert(c.doc_id).second);
  }
  for (const auto& sq : run.interpretation.subqueries) {
    for (const auto& e : sq.expansions) EXPECT_GE(e.sim_to_parent, config.tau);
  }
}

TEST(RunSmart, ExcludedDocumentsNeverAppear) {
  FixturePipeline p;
  RetrievalConfig config;
  const auto first = run_smart(Query::from_doc(testing::fixture_workplan()), p.retrieval_deps(), config);
  ASSERT_FALSE(first.context.chunks.empty());
  const auto top = first.context.chunks[0].doc_id;
  const auto second =
      run_smart(Query::from_doc(testing::fixture_workplan()), p.retrieval_deps(), config, {}, {top});
  for (const auto& c : second.reranked) EXPECT_NE(c.doc_id, top);
}

TEST(Variants, EveryVariantGivesRankedDocuments) {
  FixturePipeline p;
  RetrievalConfig config;
  config.final_k = 5;
  for (auto v : all_variants()) {
    const auto docs = run_variant(testing::fixture_workplan(), v, p.retrieval_deps(), config);
    EXPECT_LE(docs.size(), 5u) << to_string(v);
    if (v == Variant::pure_rag) {
      EXPECT_FALSE(docs.empty());
    }
    for (std::size_t i = 1; i < docs.size(); ++i) {
      EXPECT_TRUE(docs[i - 1].score > docs[i].score ||
                  (docs[i - 1].score == docs[i].score && docs[i - 1].doc_id < docs[i].doc_id))
          << to_string(v);
    }
  }
}

TEST(Variants, RunFormat) {
  EXPECT_EQ(format_run("WP-1", {{"INC-2", 0.5}, {"INC-1", 0.25}}, "pure_rag"),
            "WP-1 Q0 INC-2 1 0.500000 pure_rag\nWP-1 Q0 INC-1 2 0.250000 pure_rag\n");
  EXPECT_EQ(rank_documents({{"a#0000", 0.4}, {"a#0001", 0.9}, {"b#0000", 0.9}}, 10),
            (std::vector<RankedDoc>{{"a", 0.9}, {"b", 0.9}}));
}

TEST(Rerank, OutputIsPermutationAndContextIsPrefix) {
  std::mt19937_64 rng(17);
  JaccardCrossEncoder cross;
  const std::vector<std::string> words{"arc", "flash", "crane", "lift", "guard", "fall"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RetrievalCandidate> in;
    std::map<std::string, std::string> text;
    for (int i = 0, n = rng() % 12; i < n; ++i) {
      const auto id = "D" + std::to_string(i) + "#0000";
      in.push_back({id, "D" + std::to_string(i), static_cast<double>(rng() % 5) / 4.0, std::nullopt});
      text[id] = words[rng() % words.size()] + " " + words[rng() % words.size()];
    }
    const auto out = rerank("arc flash lift", in, cross, [&](const std::string& id) { return text.at(id); }).ranked;
    auto ids = [](std::vector<RetrievalCandidate> v) {
      std::vector<std::string> r;
      for (auto& c : v) r.push_back(c.chunk_id);
      std::sort(r.begin(), r.end());
      return r;
    };
    EXPECT_EQ(ids(out), ids(in));
    RetrievalConfig config;
    config.final_k = rng() % 6;
    const auto ctx = select_context(out, config);
    ASSERT_LE(ctx.chunks.size(), out.size());
    EXPECT_TRUE(std::equal(ctx.chunks.begin(), ctx.chunks.end(), out.begin()));
  }
}

TEST(RunSmart, IdentityRerankerWithoutExpansionReproducesPureRag) {
  FixturePipeline p;
  IdentityCrossEncoder identity;
  const RetrievalDeps deps{p.embedder, p.index, p.incidents, *p.llm, identity, p.terms};
  RetrievalConfig config;
  config.expand = false;
  config.theta = 0.0;
  config.per_subquery_K = p.index.size();
  InterpretOptions options;
  options.decompose = false;
  std::mt19937_64 rng(23);
  const auto& docs = p.incidents.documents();
  for (int trial = 0; trial < 20; ++trial) {
    auto wp = docs[rng() % docs.size()];
    wp.doc_id = "WP-" + std::to_string(trial);
    wp.body = docs[rng() % docs.size()].summary + " " + wp.body.substr(0, wp.body.size() / 2);
    config.final_k = 1 + rng() % 10;
    const auto smart = run_smart(Query::from_doc(wp), deps, config, options);
    EXPECT_EQ(smart.documents, run_variant(wp, Variant::pure_rag, deps, config)) << trial;
  }
}

}  // namespace
}  // namespace harness::retrieval
