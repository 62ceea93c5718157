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

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/corpus/corpus_store.hpp"
#include "harness/index/embedding.hpp"
#include "harness/index/vector_index.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"
#include "harness/retrieval/smart_retrieval.hpp"

namespace harness::eval {

// ---------------------------------------------------------------------------
// Qrels and run files (TREC text formats)

// Which grades count as relevant for P@k and R@k.
enum class RelevanceRule { grade_at_least_1, grade_2 };

RelevanceRule parse_relevance_rule(std::string_view text);  // "ge1" | "eq2"

struct QrelsRow {
  std::string query_id;
  std::string doc_id;
  int grade = 0;

  bool operator==(const QrelsRow&) const = default;
};

class Qrels {
 public:
  // Throws ValidationError for a grade outside 0..2 or a second, different
  // grade for the same pair. Repeating the same grade is accepted.
  void add(const QrelsRow& row);

  std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;
  bool is_relevant(const std::string& query_id, const std::string& doc_id, RelevanceRule rule) const;
  std::size_t relevant_count(const std::string& query_id, RelevanceRule rule) const;
  std::vector<std::string> queries() const;
  std::vector<QrelsRow> rows() const;
  std::size_t size() const;

  // "<query_id> 0 <doc_id> <grade>" per line; blank lines and lines starting
  // with '#' are skipped.
  static Qrels parse(std::istream& in);
  static Qrels load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::map<std::string, int>> grades_;
};

struct RunRow {
  std::string query_id;
  std::string doc_id;
  int rank = 1;
  double score = 0.0;
  std::string tag;

  bool operator==(const RunRow&) const = default;
};

class RunFile {
 public:
  // Rows of one query in rank order.
  void add_query(const std::string& query_id, const std::vector<retrieval::RankedDoc>& docs, const std::string& tag);

  // "<query_id> Q0 <doc_id> <rank> <score> <tag>". Checks contiguous 1-based
  // ranks, non-increasing scores and unique docs per query.
  static RunFile parse(std::istream& in);
  static RunFile load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  const std::vector<RunRow>& rows(const std::string& query_id) const;  // NotFoundError
  bool has_query(const std::string& query_id) const { return by_query_.count(query_id) > 0; }
  std::vector<std::string> queries() const;
  std::string tag() const;  // tag of the first row, "" when empty

 private:
  void check_query(const std::string& query_id) const;
  std::map<std::string, std::vector<RunRow>> by_query_;
};

// ---------------------------------------------------------------------------
// Pooling and metrics

// Per query: the top-`depth` docs of every run visited round-robin by rank
// (rank 1 of every run, then rank 2, ...), first appearance kept, stopping
// at `cap` docs.
std::map<std::string, std::vector<std::string>> pool(const std::vector<RunFile>& runs, std::size_t depth = 10,
                                                     std::size_t cap = 25);

// |relevant in top k| / k; unjudged docs are non-relevant. NotFoundError
// when the run lacks the query.
double precision_at_k(const RunFile& run, const std::string& query_id, const Qrels& qrels, std::size_t k = 5,
                      RelevanceRule rule = RelevanceRule::grade_at_least_1);

// |relevant in top k| / |relevant in qrels|; nullopt when the query has no
// relevant docs (the query is then excluded, not scored 0).
std::optional<double> recall_at_k(const RunFile& run, const std::string& query_id, const Qrels& qrels,
                                  std::size_t k = 5, RelevanceRule rule = RelevanceRule::grade_at_least_1);

// 2pr / (p + r), 0 when p + r is 0.
double f1(double p, double r);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;

  std::string format() const;  // "0.920 ± 0.098"
};

// Mean and standard deviation (population by default, sample otherwise).
Aggregate aggregate(const std::vector<double>& values, bool population = true);

struct QueryMetrics {
  std::string query_id;
  double p = 0.0;
  std::optional<double> r;
  std::optional<double> f;
};

struct MetricRow {
  std::string variant_tag;
  Aggregate p, r, f1;
  std::vector<QueryMetrics> per_query;
  std::vector<std::string> excluded_queries;  // no relevant docs; left out of R and F1
};

// Scores every query of the run that appears in the qrels.
MetricRow evaluate_run(const RunFile& run, const Qrels& qrels, std::size_t k = 5,
                       RelevanceRule rule = RelevanceRule::grade_at_least_1, bool population = true);

std::string metrics_csv(const std::vector<MetricRow>& rows, std::size_t k = 5);
std::string metrics_markdown(const std::vector<MetricRow>& rows, std::size_t k = 5);

// ---------------------------------------------------------------------------
// Report judge

struct Criterion {
  std::string_view name;
  std::string_view definition;
};

inline constexpr std::array<Criterion, 5> kCriteria = {{
    {"clarity", "use of technical terms"},
    {"completeness", "coverage of hazards, lessons, and mitigations"},
    {"usefulness", "support for decision-making"},
    {"accuracy", "factual grounding"},
    {"specificity", "relevance to the work plan"},
}};

struct JudgeScores {
  std::map<std::string, int> scores;  // criterion -> 1..5
  std::map<std::string, std::string> justifications;

  double overall() const;  // arithmetic mean of the five
};

json to_json(const JudgeScores& s);

// Mean of the five integer dimension scores.
double overall_score(const std::array<int, 5>& dims);

// One prompt per criterion. Scores must be integers in 1..5; an invalid
// reply gets one repair prompt and then raises AgentError.
JudgeScores judge_report(const std::string& report_text, const std::string& workplan_text, const llm::Generator& judge,
                         llm::CallLog* log = nullptr);

std::string judge_csv(const std::vector<std::pair<std::string, JudgeScores>>& rows);
std::string judge_markdown(const std::vector<std::pair<std::string, JudgeScores>>& rows);

// ---------------------------------------------------------------------------
// Embedding benchmark

struct QaPair {
  std::string question;
  std::string reference;
  std::string source_doc;
};

std::vector<QaPair> load_qa(const std::filesystem::path& jsonl);

struct RetrievedPassage {
  std::string doc_id;
  std::string text;
};

using Retriever = std::function<std::vector<RetrievedPassage>(const QaPair&)>;
using Answerer = std::function<std::string(const std::string& question, const std::vector<RetrievedPassage>&)>;
// Agreement of an answer with the reference, in [0, 1].
using AgreementJudge = std::function<double(const QaPair&, const std::string& answer)>;

// Top-k chunks by cosine to the question.
Retriever index_retriever(std::shared_ptr<const corpus::CorpusStore> corpus, std::shared_ptr<const index::Embedder> embedder,
                          std::shared_ptr<const index::VectorIndex> index, std::size_t k = 3);
// Perfect retrieval: the source document's chunks.
Retriever source_retriever(std::shared_ptr<const corpus::CorpusStore> corpus);

// Concatenated passages; the offline answerer.
Answerer extractive_answerer();
Answerer llm_answerer(std::shared_ptr<const llm::Generator> llm);

// 1 when the normalized, lowercased reference is contained in the answer.
AgreementJudge containment_judge();
AgreementJudge llm_agreement_judge(std::shared_ptr<const llm::Generator> judge);

struct BenchmarkBackend {
  std::string model;
  // Builds the retriever (e.g. indexes the corpus). Throwing an Error marks
  // the row skipped.
  std::function<Retriever()> prepare;
};

struct QuestionResult {
  std::string question;
  double agreement = 0.0;
  double seconds = 0.0;
  std::vector<std::string> retrieved_docs;
  std::string source_doc;
};

struct BenchmarkRow {
  std::string model;
  bool skipped = false;
  std::string note;
  double correctness_pct = 0.0;  // mean agreement x 100
  double avg_query_time_s = 0.0;
  double min_query_time_s = 0.0;
  double max_query_time_s = 0.0;
  std::vector<QuestionResult> questions;
  // Questions whose top passage came from a document other than the source.
  std::vector<std::string> decoy_questions;
};

using SteadyNow = std::function<std::chrono::steady_clock::time_point()>;

// Questions are answered one at a time so latency is measured per query.
std::vector<BenchmarkRow> benchmark_embeddings(const std::vector<QaPair>& qa, const std::vector<BenchmarkBackend>& backends,
                                               const Answerer& answerer, const AgreementJudge& judge,
                                               SteadyNow now = [] { return std::chrono::steady_clock::now(); });

// Columns: model, correctness %, avg query time s.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows);

}  // namespace harness::eval
