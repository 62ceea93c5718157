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
#include <fstream>
#include <sstream>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"
#include "harness/eval/eval.hpp"

namespace harness::eval {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fold_text(const std::string& s) { return corpus::ascii_lower(corpus::normalize(s)); }

std::string trimmed_chunk(const corpus::Chunk& c) {
  std::string t = c.text;
  while (!t.empty() && t.back() == ' ') t.pop_back();
  return t;
}

}  // namespace

double JudgeScores::overall() const {
  if (scores.size() != kCriteria.size()) throw ValidationError("judge scores need all five criteria");
  std::array<int, 5> dims{};
  for (std::size_t i = 0; i < kCriteria.size(); ++i) dims[i] = scores.at(std::string(kCriteria[i].name));
  return overall_score(dims);
}

double overall_score(const std::array<int, 5>& dims) {
  int sum = 0;
  for (int d : dims) {
    if (d < 1 || d > 5) throw ValidationError("dimension scores are integers in 1..5");
    sum += d;
  }
  return static_cast<double>(sum) / 5.0;
}

json to_json(const JudgeScores& s) {
  return {{"scores", s.scores}, {"justifications", s.justifications}, {"overall", round6(s.overall())}};
}

JudgeScores judge_report(const std::string& report_text, const std::string& workplan_text, const llm::Generator& judge,
                         llm::CallLog* log) {
  if (corpus::normalize(report_text).empty()) throw ValidationError("nothing to judge: empty report");
  JudgeScores out;
  for (const auto& c : kCriteria) {
    auto request = llm::render_prompt("judge_criterion", {{"criterion", std::string(c.name)},
                                                          {"definition", std::string(c.definition)},
                                                          {"workplan", workplan_text},
                                                          {"report", report_text}});
    json reply = llm::call_json(judge, request, "judge", [](const json& j) {
      const auto& score = j.at("score");
      if (!score.is_number_integer()) throw ValidationError("'score' must be an integer");
      const auto v = score.get<long long>();
      if (v < 1 || v > 5) throw ValidationError("'score' " + std::to_string(v) + " is outside 1..5");
      if (!j.at("justification").is_string()) throw ValidationError("'justification' must be a string");
    }, log);
    out.scores[std::string(c.name)] = reply.at("score").get<int>();
    out.justifications[std::string(c.name)] = reply.at("justification").get<std::string>();
  }
  return out;
}

std::string judge_csv(const std::vector<std::pair<std::string, JudgeScores>>& rows) {
  std::ostringstream out;
  out << "report";
  for (const auto& c : kCriteria) out << "," << c.name;
  out << ",overall\n";
  for (const auto& [name, s] : rows) {
    out << name;
    for (const auto& c : kCriteria) out << "," << s.scores.at(std::string(c.name));
    out << "," << fmt("%.1f", s.overall()) << "\n";
  }
  return out.str();
}

std::string judge_markdown(const std::vector<std::pair<std::string, JudgeScores>>& rows) {
  std::ostringstream out;
  out << "| Dimension | Mean Rating |\n| --- | --- |\n";
  if (rows.empty()) return out.str();
  double overall = 0.0;
  for (const auto& c : kCriteria) {
    double sum = 0.0;
    for (const auto& [_, s] : rows) sum += s.scores.at(std::string(c.name));
    std::string label(c.name);
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    out << "| " << label << " | " << fmt("%.1f", sum / static_cast<double>(rows.size())) << " |\n";
  }
  for (const auto& [_, s] : rows) overall += s.overall();
  out << "| Overall | " << fmt("%.1f", overall / static_cast<double>(rows.size())) << " |\n";
  return out.str();
}

std::vector<QaPair> load_qa(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw NotFoundError("cannot read QA set " + jsonl.string());
  std::vector<QaPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (corpus::normalize(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      QaPair qa{j.at("question").get<std::string>(), j.at("reference").get<std::string>(),
                j.at("source_doc").get<std::string>()};
      if (corpus::normalize(qa.question).empty() || corpus::normalize(qa.reference).empty()) {
        throw ValidationError("empty question or reference");
      }
      out.push_back(std::move(qa));
    } catch (const std::exception& e) {
      throw ValidationError("QA line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

Retriever index_retriever(std::shared_ptr<const corpus::CorpusStore> corpus, std::shared_ptr<const index::Embedder> embedder,
                          std::shared_ptr<const index::VectorIndex> index, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  return [corpus, embedder, index, k](const QaPair& qa) {
    std::vector<RetrievedPassage> out;
    for (const auto& hit : index->top_k(embedder->embed(qa.question), k)) {
      const auto* chunk = corpus->find_chunk(hit.chunk_id);
      if (chunk != nullptr) out.push_back({chunk->doc_id, trimmed_chunk(*chunk)});
    }
    return out;
  };
}

Retriever source_retriever(std::shared_ptr<const corpus::CorpusStore> corpus) {
  return [corpus](const QaPair& qa) {
    std::vector<RetrievedPassage> out;
    for (const auto* chunk : corpus->chunks_of(qa.source_doc)) out.push_back({chunk->doc_id, trimmed_chunk(*chunk)});
    if (out.empty()) throw NotFoundError("source document '" + qa.source_doc + "' is not in the corpus");
    return out;
  };
}

Answerer extractive_answerer() {
  return [](const std::string&, const std::vector<RetrievedPassage>& passages) {
    std::string out;
    for (const auto& p : passages) out += (out.empty() ? "" : "\n") + p.text;
    return out;
  };
}

Answerer llm_answerer(std::shared_ptr<const llm::Generator> llm) {
  return [llm](const std::string& question, const std::vector<RetrievedPassage>& passages) {
    std::string context;
    for (const auto& p : passages) context += "[" + p.doc_id + "] " + p.text + "\n";
    return llm->generate(llm::render_prompt("answer", {{"question", question}, {"context", context}}));
  };
}

AgreementJudge containment_judge() {
  return [](const QaPair& qa, const std::string& answer) {
    return fold_text(answer).find(fold_text(qa.reference)) != std::string::npos ? 1.0 : 0.0;
  };
}

AgreementJudge llm_agreement_judge(std::shared_ptr<const llm::Generator> judge) {
  return [judge](const QaPair& qa, const std::string& answer) {
    auto request = llm::render_prompt("answer_agreement",
                                      {{"question", qa.question}, {"reference", qa.reference}, {"answer", answer}});
    json reply = llm::call_json(*judge, request, "answer_judge", [](const json& j) {
      const auto& s = j.at("score");
      if (!s.is_number() || s.get<double>() < 0.0 || s.get<double>() > 1.0) {
        throw ValidationError("'score' must be a number in [0, 1]");
      }
    }, nullptr);
    return reply.at("score").get<double>();
  };
}

std::vector<BenchmarkRow> benchmark_embeddings(const std::vector<QaPair>& qa, const std::vector<BenchmarkBackend>& backends,
                                               const Answerer& answerer, const AgreementJudge& judge, SteadyNow now) {
  if (qa.empty()) throw ValidationError("benchmark needs at least one QA pair");
  std::vector<BenchmarkRow> rows;
  for (const auto& backend : backends) {
    BenchmarkRow row;
    row.model = backend.model;
    try {
      const Retriever retrieve = backend.prepare();
      double total = 0.0, agreement = 0.0;
      for (const auto& q : qa) {
        const auto t0 = now();
        const auto passages = retrieve(q);
        const auto answer = answerer(q.question, passages);
        const double seconds = std::chrono::duration<double>(now() - t0).count();
        QuestionResult r{q.question, std::clamp(judge(q, answer), 0.0, 1.0), seconds, {}, q.source_doc};
        for (const auto& p : passages) r.retrieved_docs.push_back(p.doc_id);
        if (passages.empty() || passages.front().doc_id != q.source_doc) row.decoy_questions.push_back(q.question);
        total += seconds;
        agreement += r.agreement;
        row.min_query_time_s = row.questions.empty() ? seconds : std::min(row.min_query_time_s, seconds);
        row.max_query_time_s = std::max(row.max_query_time_s, seconds);
        row.questions.push_back(std::move(r));
      }
      row.correctness_pct = 100.0 * agreement / static_cast<double>(qa.size());
      row.avg_query_time_s = total / static_cast<double>(qa.size());
    } catch (const Error& e) {
      row = BenchmarkRow{};
      row.model = backend.model;
      row.skipped = true;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "model,correctness_pct,avg_query_time_s\n";
  for (const auto& r : rows) {
    if (r.skipped) {
      out << r.model << ",skipped,skipped\n";
    } else {
      out << r.model << "," << fmt("%.1f", r.correctness_pct) << "," << fmt("%.3f", r.avg_query_time_s) << "\n";
    }
  }
  return out.str();
}

std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "| Model | Correctness (%) | Avg Query Time (s) |\n| --- | --- | --- |\n";
  for (const auto& r : rows) {
    if (r.skipped) {
      out << "| " << r.model << " | skipped | skipped |\n";
    } else {
      out << "| " << r.model << " | " << fmt("%.1f", r.correctness_pct) << " | " << fmt("%.3f", r.avg_query_time_s)
          << " |\n";
    }
  }
  return out.str();
}

}  // namespace harness::eval
