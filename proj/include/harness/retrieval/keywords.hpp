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
#include <string>
#include <unordered_map>
#include <vector>

#include "harness/corpus/corpus_store.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"

namespace harness::retrieval {

// Terms eligible as keywords: lowercased word tokens of three or more
// characters containing a letter, minus a fixed English stopword list.
std::vector<std::string> keyword_terms(const std::string& text);
bool is_stopword(const std::string& lowered);

// Document frequencies over a corpus (event name, summary and body).
class TermStatistics {
 public:
  TermStatistics() = default;
  explicit TermStatistics(const std::vector<corpus::Document>& docs);

  std::size_t doc_count() const { return doc_count_; }
  std::size_t df(const std::string& term) const;
  // Smoothed idf: ln((1 + N) / (1 + df)) + 1.
  double idf(const std::string& term) const;

 private:
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

struct ScoredTerm {
  std::string term;
  std::size_t tf = 0;
  double score = 0.0;
};

// tf * idf over keyword_terms(text), highest first, ties by term.
std::vector<ScoredTerm> tfidf_terms(const std::string& text, const TermStatistics& stats, std::size_t n);

// Runs of two or more consecutive capitalized word tokens (not broken by
// punctuation), distinct, in order of first appearance.
std::vector<std::string> capitalized_spans(const std::string& text);

// Rule-based keyword query: top-n tf-idf terms followed by the entity spans.
std::vector<std::string> rule_keywords(const std::string& text, const TermStatistics& stats, std::size_t n = 5);

// Keywords from the generation backend; at most `n`, deduplicated.
std::vector<std::string> llm_keywords(const std::string& title, const std::string& text, std::size_t n,
                                      const llm::Generator& llm, llm::CallLog* log);

}  // namespace harness::retrieval
