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

#include "harness/retrieval/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::retrieval {

bool is_stopword(const std::string& w) {
  static const std::unordered_set<std::string> kStop = {
      "a",     "about", "above", "after", "again", "all",   "also",  "an",    "and",   "any",   "are",
      "as",    "at",    "be",    "been",  "before", "being", "below", "between", "both", "but",  "by",
      "can",   "could", "did",   "do",    "does",  "during", "each", "for",   "from",  "had",   "has",
      "have",  "he",    "her",   "his",   "how",   "if",    "in",    "into",  "is",    "it",    "its",
      "may",   "more",  "most",  "must",  "no",    "not",   "of",    "on",    "once",  "only",  "or",
      "other", "our",   "out",   "over",  "per",   "shall", "she",   "should", "so",   "some",  "such",
      "than",  "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",  "those",
      "through", "to",  "under", "until", "up",    "upon",  "very",  "was",   "we",    "were",  "what",
      "when",  "where", "which", "while", "who",   "will",  "with",  "within", "without", "would", "you"};
  return kStop.count(w) != 0;
}

std::vector<std::string> keyword_terms(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& span : corpus::tokenize_spans(text)) {
    if (!span.word || span.end - span.begin < 3) continue;
    std::string t = corpus::ascii_lower(std::string_view(text).substr(span.begin, span.end - span.begin));
    if (std::none_of(t.begin(), t.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c & 0x80); })) continue;
    if (is_stopword(t)) continue;
    out.push_back(std::move(t));
  }
  return out;
}

TermStatistics::TermStatistics(const std::vector<corpus::Document>& docs) : doc_count_(docs.size()) {
  for (const auto& d : docs) {
    std::set<std::string> seen;
    for (const auto* field : {&d.event_name, &d.summary, &d.body}) {
      for (auto& t : keyword_terms(*field)) seen.insert(std::move(t));
    }
    for (const auto& t : seen) ++df_[t];
  }
}

std::size_t TermStatistics::df(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double TermStatistics::idf(const std::string& term) const {
  return std::log((1.0 + static_cast<double>(doc_count_)) / (1.0 + static_cast<double>(df(term)))) + 1.0;
}

std::vector<ScoredTerm> tfidf_terms(const std::string& text, const TermStatistics& stats, std::size_t n) {
  std::map<std::string, std::size_t> tf;
  for (const auto& t : keyword_terms(text)) ++tf[t];
  std::vector<ScoredTerm> scored;
  for (const auto& [term, count] : tf) {
    scored.push_back({term, count, static_cast<double>(count) * stats.idf(term)});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

std::vector<std::string> capitalized_spans(const std::string& text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::vector<corpus::TokenSpan> run;
  auto flush = [&] {
    if (run.size() >= 2) {
      std::string span = text.substr(run.front().begin, run.back().end - run.front().begin);
      if (seen.insert(span).second) out.push_back(std::move(span));
    }
    run.clear();
  };
  for (const auto& s : corpus::tokenize_spans(text)) {
    const char first = text[s.begin];
    if (s.word && first >= 'A' && first <= 'Z') {
      // Consecutive only when separated by nothing but whitespace.
      if (!run.empty()) {
        bool gap_is_space = true;
        for (std::size_t i = run.back().end; i < s.begin; ++i) {
          if (text[i] != ' ') gap_is_space = false;
        }
        if (!gap_is_space) flush();
      }
      run.push_back(s);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> rule_keywords(const std::string& text, const TermStatistics& stats, std::size_t n) {
  std::vector<std::string> out;
  for (auto& t : tfidf_terms(text, stats, n)) out.push_back(std::move(t.term));
  for (auto& e : capitalized_spans(text)) out.push_back(std::move(e));
  return out;
}

std::vector<std::string> llm_keywords(const std::string& title, const std::string& text, std::size_t n,
                                      const llm::Generator& llm, llm::CallLog* log) {
  auto request = llm::render_prompt("keywords", {{"count", std::to_string(n)}, {"title", title}, {"text", text}});
  json reply = llm::call_json(llm, request, "keywords", [](const json& j) {
    const auto& kw = j.at("keywords");
    if (!kw.is_array()) throw ValidationError("'keywords' must be an array");
    for (const auto& k : kw) {
      if (!k.is_string()) throw ValidationError("keywords must be strings");
    }
  }, log);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& k : reply.at("keywords")) {
    auto kw = corpus::normalize(k.get<std::string>());
    if (kw.empty() || !seen.insert(corpus::ascii_lower(kw)).second) continue;
    out.push_back(std::move(kw));
    if (out.size() == n) break;
  }
  return out;
}

}  // namespace harness::retrieval
