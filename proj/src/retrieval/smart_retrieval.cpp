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

#include "harness/retrieval/smart_retrieval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::retrieval {

Query Query::from_text(std::string text) {
  Query q;
  q.kind = QueryKind::text;
  q.text = std::move(text);
  return q;
}

Query Query::from_doc(corpus::Document doc) {
  Query q;
  q.kind = QueryKind::doc;
  q.docs.push_back(std::move(doc));
  return q;
}

Query Query::from_docs(std::vector<corpus::Document> docs) {
  Query q;
  q.kind = QueryKind::doc_set;
  q.docs = std::move(docs);
  return q;
}

void Query::validate() const {
  switch (kind) {
    case QueryKind::text:
      if (corpus::normalize(text).empty()) throw ValidationError("empty text query");
      break;
    case QueryKind::doc:
      if (docs.size() != 1) throw ValidationError("document query needs exactly one document");
      if (canonical_text(docs[0]).empty()) throw ValidationError("empty document query");
      break;
    case QueryKind::doc_set: {
      if (docs.empty()) throw ValidationError("empty document-set query");
      std::set<std::string> ids;
      for (const auto& d : docs) {
        if (!ids.insert(d.doc_id).second) throw ValidationError("duplicate document '" + d.doc_id + "' in query");
        if (canonical_text(d).empty()) throw ValidationError("empty document '" + d.doc_id + "' in query");
      }
      break;
    }
  }
}

std::string canonical_text(const corpus::Document& doc) {
  std::string joined;
  for (const auto* part : {&doc.event_name, &doc.summary, &doc.body}) {
    auto p = corpus::normalize(*part);
    if (p.empty()) continue;
    if (!joined.empty()) joined += ' ';
    joined += p;
  }
  return joined;
}

std::string canonical_text(const Query& query) {
  if (query.kind == QueryKind::text) return corpus::normalize(query.text);
  std::string joined;
  for (const auto& d : query.docs) {
    auto t = canonical_text(d);
    if (t.empty()) continue;
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return joined;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::current_best: return "current_best";
    case Variant::keywords_only: return "keywords_only";
    case Variant::pure_rag: return "pure_rag";
    case Variant::title_only: return "title_only";
    case Variant::rule_keywords: return "rule_keywords";
    case Variant::extended_keywords: return "extended_keywords";
  }
  return "current_best";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> kAll = {Variant::current_best, Variant::keywords_only,   Variant::pure_rag,
                                            Variant::title_only,   Variant::rule_keywords,   Variant::extended_keywords};
  return kAll;
}

Variant parse_variant(std::string_view name) {
  for (auto v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw ValidationError("unknown variant '" + std::string(name) + "'");
}

void RetrievalConfig::validate() const {
  if (!(0.0 <= theta && theta <= tau && tau <= 1.0)) throw ValidationError("need 0 <= theta <= tau <= 1");
  if (per_subquery_K < 1 || final_k < 1 || expansions_per_subquery < 1) {
    throw ValidationError("retrieval counts must be >= 1");
  }
}

std::string_view to_string(DecompositionReason r) {
  switch (r) {
    case DecompositionReason::atomic: return "atomic";
    case DecompositionReason::compound: return "compound";
    case DecompositionReason::underspecified: return "underspecified";
  }
  return "atomic";
}

std::size_t count_task_clauses(const std::string& text) {
  const auto tokens = corpus::lower_tokens(corpus::normalize(text));
  std::size_t clauses = 0;
  bool has_word = false;
  for (const auto& t : tokens) {
    if (t == "and" || t == "then" || t == ";") {
      if (has_word) ++clauses;
      has_word = false;
    } else if (!corpus::tokenize_spans(t).empty() && corpus::tokenize_spans(t).front().word) {
      has_word = true;
    }
  }
  if (has_word) ++clauses;
  return clauses;
}

namespace {

bool supported_by(const std::string& subquery, const std::set<std::string>& source_words) {
  std::size_t words = 0, supported = 0;
  for (const auto& span : corpus::tokenize_spans(subquery)) {
    if (!span.word) continue;
    ++words;
    if (source_words.count(corpus::ascii_lower(subquery.substr(span.begin, span.end - span.begin)))) ++supported;
  }
  return words > 0 && 2 * supported >= words;
}

std::set<std::string> word_set(const std::string& text) {
  std::set<std::string> out;
  for (const auto& span : corpus::tokenize_spans(text)) {
    if (span.word) out.insert(corpus::ascii_lower(text.substr(span.begin, span.end - span.begin)));
  }
  return out;
}

void check_subquery(const std::string& s, const std::set<std::string>& source_words, std::size_t max_tokens) {
  if (s.empty()) throw ValidationError("empty subquery");
  if (corpus::tokenize_spans(s).size() > max_tokens) throw ValidationError("subquery longer than the token limit");
  if (!supported_by(s, source_words)) throw ValidationError("subquery '" + s + "' is not supported by the query text");
}

std::vector<std::string> decompose_text(const std::string& canonical, const llm::Generator& llm,
                                        const InterpretOptions& options, llm::CallLog* log) {
  auto request = llm::render_prompt("interpret_decompose", {{"query", canonical}});
  json reply = llm::call_json(llm, request, "interpret", [](const json& j) {
    const auto& s = j.at("subqueries");
    if (!s.is_array() || s.empty()) throw ValidationError("'subqueries' must be a non-empty array");
    for (const auto& x : s) {
      if (!x.is_string()) throw ValidationError("subqueries must be strings");
    }
  }, log);
  const auto source_words = word_set(canonical);
  std::vector<std::string> out;
  for (const auto& s : reply.at("subqueries")) {
    auto text = corpus::normalize(s.get<std::string>());
    check_subquery(text, source_words, options.max_subquery_tokens);
    if (std::find(out.begin(), out.end(), text) == out.end()) out.push_back(std::move(text));
  }
  return out;
}

}  // namespace

QueryInterpretation interpret(const Query& query, const llm::Generator& llm, const index::Embedder& embedder,
                              const InterpretOptions& options, llm::CallLog* log) {
  query.validate();
  QueryInterpretation out;
  out.canonical_text = canonical_text(query);
  out.intent_vector = embedder.embed(out.canonical_text);

  auto atomic = [&](DecompositionReason reason) {
    out.subqueries = {Subquery{out.canonical_text, {}}};
    out.reason = reason;
  };

  if (!options.decompose) {
    atomic(DecompositionReason::atomic);
    return out;
  }

  if (query.kind == QueryKind::doc_set) {
    for (const auto& d : query.docs) out.subqueries.push_back({canonical_text(d), {}});
    out.reason = out.subqueries.size() > 1 ? DecompositionReason::compound : DecompositionReason::atomic;
    return out;
  }

  std::vector<std::string> parts;
  try {
    if (query.kind == QueryKind::text) {
      if (count_task_clauses(out.canonical_text) < 2) {
        atomic(DecompositionReason::atomic);
        return out;
      }
      parts = decompose_text(out.canonical_text, llm, options, log);
    } else {
      const auto& doc = query.docs.front();
      if (options.include_full_text) parts.push_back(out.canonical_text);
      const auto title = corpus::normalize(doc.event_name);
      if (!title.empty()) parts.push_back(title);
      auto keywords = llm_keywords(title, out.canonical_text, options.keyword_count, llm, log);
      std::string joined;
      for (const auto& k : keywords) joined += (joined.empty() ? "" : " ") + k;
      joined = corpus::normalize(joined);
      if (!joined.empty()) {
        check_subquery(joined, word_set(out.canonical_text), options.max_subquery_tokens);
        parts.push_back(joined);
      }
    }
  } catch (const Error& e) {
    if (log) log->note(std::string("interpret: decomposition unavailable, using the whole query (") + e.what() + ")");
    atomic(DecompositionReason::underspecified);
    return out;
  }

  std::vector<std::string> unique;
  for (auto& p : parts) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(std::move(p));
  }
  if (unique.size() < 2) {
    atomic(DecompositionReason::atomic);
    return out;
  }
  for (auto& p : unique) out.subqueries.push_back({std::move(p), {}});
  out.reason = DecompositionReason::compound;
  return out;
}

Subquery expand(const std::string& subquery, const llm::Generator& llm, const index::Embedder& embedder,
                const RetrievalConfig& config, llm::CallLog* log, std::size_t max_tokens) {
  const std::string text = corpus::normalize(subquery);
  if (text.empty()) throw ValidationError("cannot expand an empty subquery");

  std::vector<std::string> paraphrases;
  if (config.expand && corpus::tokenize_spans(text).size() <= max_tokens) {
    try {
      auto request = llm::render_prompt(
          "expand_paraphrase", {{"count", std::to_string(config.expansions_per_subquery)}, {"subquery", text}});
      json reply = llm::call_json(llm, request, "expand", [](const json& j) {
        const auto& p = j.at("paraphrases");
        if (!p.is_array()) throw ValidationError("'paraphrases' must be an array");
        for (const auto& x : p) {
          if (!x.is_string()) throw ValidationError("paraphrases must be strings");
        }
      }, log);
      for (const auto& p : reply.at("paraphrases")) {
        auto t = corpus::normalize(p.get<std::string>());
        if (t.empty() || t == text) continue;
        if (std::find(paraphrases.begin(), paraphrases.end(), t) != paraphrases.end()) continue;
        paraphrases.push_back(std::move(t));
        if (paraphrases.size() == config.expansions_per_subquery) break;
      }
    } catch (const Error& e) {
      if (log) log->note(std::string("expand: paraphrases unavailable (") + e.what() + ")");
      paraphrases.clear();
    }
  }

  std::vector<std::string> texts{text};
  texts.insert(texts.end(), paraphrases.begin(), paraphrases.end());
  auto vectors = embedder.embed_batch(texts);

  Subquery out{text, {}};
  out.expansions.push_back({text, 1.0, vectors[0]});
  for (std::size_t i = 1; i < texts.size(); ++i) {
    const double sim = index::cosine(vectors[i], vectors[0]);
    if (sim >= config.tau) {
      out.expansions.push_back({texts[i], sim, std::move(vectors[i])});
    } else if (log) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", sim);
      log->note("expand: dropped paraphrase below tau (sim " + std::string(buf) + ")");
    }
  }
  return out;
}

std::string doc_id_of_chunk(const std::string& chunk_id) {
  auto hash = chunk_id.rfind('#');
  return hash == std::string::npos ? chunk_id : chunk_id.substr(0, hash);
}

std::vector<RetrievalCandidate> retrieve_pool(const QueryInterpretation& interpretation,
                                              const index::VectorIndex& index, const RetrievalConfig& config,
                                              const DocPredicate& exclude) {
  std::vector<const index::EmbeddingVector*> queries;
  for (const auto& sq : interpretation.subqueries) {
    for (const auto& e : sq.expansions) {
      if (e.embedding.dim() != index.dim()) {
        throw ValidationError("dimension mismatch: index " + std::to_string(index.dim()) + ", query " +
                              std::to_string(e.embedding.dim()));
      }
      queries.push_back(&e.embedding);
    }
  }
  if (index.empty()) return {};

  std::vector<std::string> order;
  std::unordered_set<std::string> seen;
  for (const auto* q : queries) {
    for (const auto& hit : index.top_k(*q, config.per_subquery_K)) {
      if (exclude && exclude(doc_id_of_chunk(hit.chunk_id))) continue;
      if (seen.insert(hit.chunk_id).second) order.push_back(hit.chunk_id);
    }
  }

  std::vector<RetrievalCandidate> pool;
  pool.reserve(order.size());
  for (const auto& id : order) {
    double best = -1.0;
    for (const auto* q : queries) best = std::max(best, index.cosine_to(id, *q));
    pool.push_back({id, doc_id_of_chunk(id), best, std::nullopt});
  }
  std::sort(pool.begin(), pool.end(), [](const RetrievalCandidate& a, const RetrievalCandidate& b) {
    if (a.best_query_sim != b.best_query_sim) return a.best_query_sim > b.best_query_sim;
    return a.chunk_id < b.chunk_id;
  });
  return pool;
}

std::vector<RetrievalCandidate> filter(std::vector<RetrievalCandidate> pool, const RetrievalConfig& config) {
  std::erase_if(pool, [&](const RetrievalCandidate& c) { return !(c.best_query_sim >= config.theta); });
  return pool;
}

std::vector<RetrievalCandidate> dedupe_by_document(const std::vector<RetrievalCandidate>& candidates) {
  std::unordered_map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto [it, inserted] = best.emplace(candidates[i].doc_id, i);
    if (!inserted) {
      const auto& cur = candidates[it->second];
      const auto& cand = candidates[i];
      if (cand.best_query_sim > cur.best_query_sim ||
          (cand.best_query_sim == cur.best_query_sim && cand.chunk_id < cur.chunk_id)) {
        it->second = i;
      }
    }
  }
  std::vector<RetrievalCandidate> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (best.at(candidates[i].doc_id) == i) out.push_back(candidates[i]);
  }
  return out;
}

RerankOutcome rerank(const std::string& query_text, std::vector<RetrievalCandidate> filtered,
                     const CrossEncoder& cross, const PassageLookup& passage_text) {
  RerankOutcome out;
  if (filtered.size() <= 1) {
    if (filtered.size() == 1) {
      try {
        std::vector<Passage> p{{filtered[0].chunk_id, passage_text(filtered[0].chunk_id), filtered[0].best_query_sim}};
        filtered[0].rerank_score = cross.score(query_text, p).at(0);
      } catch (const Error& e) {
        out.fell_back = true;
        out.note = std::string("rerank: cross-encoder failed, kept first-stage order (") + e.what() + ")";
      }
    }
    out.ranked = std::move(filtered);
    return out;
  }

  std::vector<Passage> passages;
  passages.reserve(filtered.size());
  for (const auto& c : filtered) passages.push_back({c.chunk_id, passage_text(c.chunk_id), c.best_query_sim});

  try {
    auto scores = cross.score(query_text, passages);
    if (scores.size() != filtered.size()) throw Error(ErrorCode::backend_unavailable, "score count mismatch");
    for (std::size_t i = 0; i < filtered.size(); ++i) filtered[i].rerank_score = scores[i];
    std::sort(filtered.begin(), filtered.end(), [](const RetrievalCandidate& a, const RetrievalCandidate& b) {
      if (*a.rerank_score != *b.rerank_score) return *a.rerank_score > *b.rerank_score;
      return a.chunk_id < b.chunk_id;
    });
  } catch (const Error& e) {
    for (auto& c : filtered) c.rerank_score.reset();
    std::sort(filtered.begin(), filtered.end(), [](const RetrievalCandidate& a, const RetrievalCandidate& b) {
      if (a.best_query_sim != b.best_query_sim) return a.best_query_sim > b.best_query_sim;
      return a.chunk_id < b.chunk_id;
    });
    out.fell_back = true;
    out.note = std::string("rerank: cross-encoder failed, ordered by first-stage similarity (") + e.what() + ")";
  }
  out.ranked = std::move(filtered);
  return out;
}

ContextSet select_context(const std::vector<RetrievalCandidate>& reranked, const RetrievalConfig& config) {
  ContextSet ctx;
  ctx.k = config.final_k;
  const std::size_t n = std::min(config.final_k, reranked.size());
  ctx.chunks.assign(reranked.begin(), reranked.begin() + static_cast<std::ptrdiff_t>(n));
  return ctx;
}

RetrievalRun run_smart(const Query& query, const RetrievalDeps& deps, const RetrievalConfig& config,
                       const InterpretOptions& options, const std::set<std::string>& excluded_docs) {
  config.validate();
  if (deps.index.backend().backend_id != deps.embedder.descriptor().backend_id) {
    throw ValidationError("index was built with '" + deps.index.backend().backend_id + "', query embedder is '" +
                          deps.embedder.descriptor().backend_id + "'");
  }
  RetrievalRun run;
  run.interpretation = interpret(query, deps.llm, deps.embedder, options, &run.log);
  for (auto& sq : run.interpretation.subqueries) {
    sq = expand(sq.text, deps.llm, deps.embedder, config, &run.log, options.max_subquery_tokens);
  }
  DocPredicate exclude;
  if (!excluded_docs.empty()) exclude = [&](const std::string& d) { return excluded_docs.count(d) != 0; };
  auto pool = retrieve_pool(run.interpretation, deps.index, config, exclude);
  run.pool_size = pool.size();
  auto kept = filter(std::move(pool), config);
  run.filtered_size = kept.size();
  auto representatives = dedupe_by_document(kept);

  auto lookup = [&](const std::string& chunk_id) -> std::string {
    const auto* c = deps.corpus.find_chunk(chunk_id);
    return c ? c->text : std::string();
  };
  auto outcome = rerank(run.interpretation.canonical_text, std::move(representatives), deps.cross, lookup);
  if (outcome.fell_back) run.log.note(outcome.note);
  run.rerank_fell_back = outcome.fell_back;
  run.reranked = std::move(outcome.ranked);
  run.context = select_context(run.reranked, config);

  for (const auto& c : run.context.chunks) {
    run.documents.push_back({c.doc_id, c.rerank_score.value_or(c.best_query_sim)});
  }
  std::stable_sort(run.documents.begin(), run.documents.end(), [](const RankedDoc& a, const RankedDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  return run;
}

std::vector<RankedDoc> rank_documents(const std::vector<index::SearchHit>& hits, std::size_t limit) {
  std::map<std::string, double> best;
  for (const auto& h : hits) {
    const auto doc = doc_id_of_chunk(h.chunk_id);
    auto [it, inserted] = best.emplace(doc, h.score);
    if (!inserted) it->second = std::max(it->second, h.score);
  }
  std::vector<RankedDoc> docs;
  for (const auto& [id, score] : best) docs.push_back({id, score});
  std::sort(docs.begin(), docs.end(), [](const RankedDoc& a, const RankedDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (docs.size() > limit) docs.resize(limit);
  return docs;
}

namespace {

std::vector<RankedDoc> rank_by_text(const std::string& text, const RetrievalDeps& deps, std::size_t limit) {
  if (deps.index.empty()) return {};
  const auto q = deps.embedder.embed(text);
  return rank_documents(deps.index.top_k(q, deps.index.size()), limit);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

}  // namespace

std::vector<RankedDoc> run_variant(const corpus::Document& workplan, Variant variant, const RetrievalDeps& deps,
                                   const RetrievalConfig& config, llm::CallLog* log) {
  config.validate();
  const std::string canonical = canonical_text(workplan);
  if (canonical.empty()) throw ValidationError("empty work plan");
  switch (variant) {
    case Variant::pure_rag:
      return rank_by_text(canonical, deps, config.final_k);
    case Variant::title_only: {
      auto title = corpus::normalize(workplan.event_name);
      return rank_by_text(title.empty() ? canonical : title, deps, config.final_k);
    }
    case Variant::rule_keywords:
      return rank_by_text(join(rule_keywords(canonical, deps.terms, 5)), deps, config.final_k);
    case Variant::keywords_only: {
      std::vector<std::string> keywords;
      try {
        keywords = llm_keywords(corpus::normalize(workplan.event_name), canonical, 5, deps.llm, log);
      } catch (const Error& e) {
        if (log) log->note(std::string("keywords_only: backend keywords unavailable, using tf-idf (") + e.what() + ")");
      }
      if (keywords.empty()) keywords = rule_keywords(canonical, deps.terms, 5);
      return rank_by_text(join(keywords), deps, config.final_k);
    }
    case Variant::current_best:
    case Variant::extended_keywords: {
      InterpretOptions options;
      options.keyword_count = variant == Variant::current_best ? 5 : 10;
      options.include_full_text = variant == Variant::current_best;
      auto run = run_smart(Query::from_doc(workplan), deps, config, options);
      if (log) {
        for (auto& n : run.log.notes) log->note(std::move(n));
      }
      return run.documents;
    }
  }
  throw ValidationError("unknown variant");
}

std::string format_run(const std::string& query_id, const std::vector<RankedDoc>& docs, const std::string& tag) {
  std::ostringstream out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof score, "%.6f", docs[i].score);
    out << query_id << " Q0 " << docs[i].doc_id << ' ' << (i + 1) << ' ' << score << ' ' << tag << '\n';
  }
  return out.str();
}

}  // namespace harness::retrieval
