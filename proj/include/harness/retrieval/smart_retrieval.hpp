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
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "harness/corpus/corpus_store.hpp"
#include "harness/index/embedding.hpp"
#include "harness/index/vector_index.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"
#include "harness/retrieval/cross_encoder.hpp"
#include "harness/retrieval/keywords.hpp"

namespace harness::retrieval {

enum class QueryKind { text, doc, doc_set };

struct Query {
  QueryKind kind = QueryKind::text;
  std::string text;
  std::vector<corpus::Document> docs;

  static Query from_text(std::string text);
  static Query from_doc(corpus::Document doc);
  static Query from_docs(std::vector<corpus::Document> docs);
  void validate() const;
};

// Title, summary and body joined and normalized.
std::string canonical_text(const corpus::Document& doc);
std::string canonical_text(const Query& query);

enum class Variant { current_best, keywords_only, pure_rag, title_only, rule_keywords, extended_keywords };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

struct RetrievalConfig {
  double tau = 0.8;    // expansion closeness, inclusive
  double theta = 0.5;  // candidate filter, inclusive
  std::size_t per_subquery_K = 50;
  std::size_t final_k = 10;
  std::size_t expansions_per_subquery = 3;
  Variant variant = Variant::current_best;
  bool expand = true;

  void validate() const;
};

struct Expansion {
  std::string text;
  double sim_to_parent = 0.0;
  index::EmbeddingVector embedding;
};

struct Subquery {
  std::string text;
  std::vector<Expansion> expansions;  // the original first, sim 1.0
};

enum class DecompositionReason { atomic, compound, underspecified };
std::string_view to_string(DecompositionReason r);

struct QueryInterpretation {
  std::string canonical_text;
  index::EmbeddingVector intent_vector;
  std::vector<Subquery> subqueries;
  DecompositionReason reason = DecompositionReason::atomic;
};

struct InterpretOptions {
  bool decompose = true;
  // Document queries: keyword subquery size and whether the full text is a
  // subquery of its own.
  std::size_t keyword_count = 5;
  bool include_full_text = true;
  std::size_t max_subquery_tokens = 64;
};

// Task clauses joined by "and", "then" or ";".
std::size_t count_task_clauses(const std::string& text);

// Text queries with two or more clauses are decomposed by the backend;
// every returned subquery is validated (non-empty, at most 64 tokens, at
// least half of its words present in the query). Document queries are
// decomposed into full text, title and backend keywords; document sets into
// one subquery per document. Any backend or validation failure falls back to
// a single subquery holding the whole text with reason underspecified.
QueryInterpretation interpret(const Query& query, const llm::Generator& llm, const index::Embedder& embedder,
                              const InterpretOptions& options = {}, llm::CallLog* log = nullptr);

// Requests paraphrases and keeps those with cosine to the subquery >= tau.
// The original is always kept with similarity 1.0. Subqueries longer than
// `max_tokens` are not paraphrased.
Subquery expand(const std::string& subquery, const llm::Generator& llm, const index::Embedder& embedder,
                const RetrievalConfig& config, llm::CallLog* log = nullptr, std::size_t max_tokens = 64);

struct RetrievalCandidate {
  std::string chunk_id;
  std::string doc_id;
  double best_query_sim = 0.0;
  std::optional<double> rerank_score;

  bool operator==(const RetrievalCandidate&) const = default;
};

// Parent document of a chunk id ("<doc_id>#<seq>"); ids without a sequence
// suffix are their own document.
std::string doc_id_of_chunk(const std::string& chunk_id);

using DocPredicate = std::function<bool(const std::string& doc_id)>;

// Union of the per-expansion top-K hits, deduplicated by chunk. A
// candidate's best_query_sim is its maximum cosine over every expansion
// embedding. Ordered by best_query_sim descending, ties by chunk_id.
// Candidates whose document satisfies `exclude` are dropped.
std::vector<RetrievalCandidate> retrieve_pool(const QueryInterpretation& interpretation,
                                              const index::VectorIndex& index, const RetrievalConfig& config,
                                              const DocPredicate& exclude = {});

// Keeps best_query_sim >= theta, order preserved.
std::vector<RetrievalCandidate> filter(std::vector<RetrievalCandidate> pool, const RetrievalConfig& config);

// Highest best_query_sim chunk per document, order preserved.
std::vector<RetrievalCandidate> dedupe_by_document(const std::vector<RetrievalCandidate>& candidates);

using PassageLookup = std::function<std::string(const std::string& chunk_id)>;

struct RerankOutcome {
  std::vector<RetrievalCandidate> ranked;
  bool fell_back = false;
  std::string note;
};

// Scores every candidate with the cross-encoder and sorts by score
// descending, ties by chunk_id. If the backend fails the candidates are
// ordered by best_query_sim instead and rerank_score stays empty.
RerankOutcome rerank(const std::string& query_text, std::vector<RetrievalCandidate> filtered,
                     const CrossEncoder& cross, const PassageLookup& passage_text);

struct ContextSet {
  std::vector<RetrievalCandidate> chunks;
  std::size_t k = 10;
};

ContextSet select_context(const std::vector<RetrievalCandidate>& reranked, const RetrievalConfig& config);

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const RankedDoc&) const = default;
};

struct RetrievalDeps {
  const index::Embedder& embedder;
  const index::VectorIndex& index;
  const corpus::CorpusStore& corpus;
  const llm::Generator& llm;
  const CrossEncoder& cross;
  const TermStatistics& terms;
};

struct RetrievalRun {
  QueryInterpretation interpretation;
  std::size_t pool_size = 0;
  std::size_t filtered_size = 0;
  std::vector<RetrievalCandidate> reranked;
  ContextSet context;
  std::vector<RankedDoc> documents;
  bool rerank_fell_back = false;
  llm::CallLog log;
};

// The full pipeline: interpret, expand, pool, filter, dedupe by document,
// rerank, select.
RetrievalRun run_smart(const Query& query, const RetrievalDeps& deps, const RetrievalConfig& config,
                       const InterpretOptions& options = {}, const std::set<std::string>& excluded_docs = {});

// Document-level ranking from chunk scores: max over a document's chunks,
// score descending, ties by doc_id.
std::vector<RankedDoc> rank_documents(const std::vector<index::SearchHit>& hits, std::size_t limit);

// One of the six evaluation variants, giving the top final_k documents.
std::vector<RankedDoc> run_variant(const corpus::Document& workplan, Variant variant, const RetrievalDeps& deps,
                                   const RetrievalConfig& config, llm::CallLog* log = nullptr);

// TREC run rows: "<query_id> Q0 <doc_id> <rank> <score> <tag>".
std::string format_run(const std::string& query_id, const std::vector<RankedDoc>& docs, const std::string& tag);

}  // namespace harness::retrieval
