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
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "harness/common/error.hpp"
#include "harness/eval/eval.hpp"

namespace harness::eval {
namespace {

std::vector<std::string> fields_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

bool skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

int parse_int(const std::string& s, const std::string& what, std::size_t line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ValidationError("line " + std::to_string(line) + ": " + what + " '" + s + "' is not an integer");
  return v;
}

double parse_double(const std::string& s, const std::string& what, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw ValidationError("line " + std::to_string(line) + ": " + what + " '" + s + "' is not a number");
  }
  return v;
}

std::size_t hits_in_top_k(const RunFile& run, const std::string& query_id, const Qrels& qrels, std::size_t k,
                          RelevanceRule rule) {
  const auto& rows = run.rows(query_id);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows.size() && i < k; ++i) {
    if (qrels.is_relevant(query_id, rows[i].doc_id, rule)) ++hits;
  }
  return hits;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

RelevanceRule parse_relevance_rule(std::string_view text) {
  if (text == "ge1") return RelevanceRule::grade_at_least_1;
  if (text == "eq2") return RelevanceRule::grade_2;
  throw ValidationError("unknown relevance rule '" + std::string(text) + "' (ge1, eq2)");
}

void Qrels::add(const QrelsRow& row) {
  if (row.grade < 0 || row.grade > 2) {
    throw ValidationError("grade " + std::to_string(row.grade) + " for (" + row.query_id + ", " + row.doc_id +
                          ") is outside 0..2");
  }
  if (row.query_id.empty() || row.doc_id.empty()) throw ValidationError("qrels rows need a query id and a doc id");
  auto [it, inserted] = grades_[row.query_id].try_emplace(row.doc_id, row.grade);
  if (!inserted && it->second != row.grade) {
    throw ValidationError("conflicting grades for (" + row.query_id + ", " + row.doc_id + "): " +
                          std::to_string(it->second) + " and " + std::to_string(row.grade));
  }
}

std::optional<int> Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return std::nullopt;
  auto d = q->second.find(doc_id);
  if (d == q->second.end()) return std::nullopt;
  return d->second;
}

bool Qrels::is_relevant(const std::string& query_id, const std::string& doc_id, RelevanceRule rule) const {
  auto g = grade(query_id, doc_id);
  if (!g) return false;
  return rule == RelevanceRule::grade_2 ? *g == 2 : *g >= 1;
}

std::size_t Qrels::relevant_count(const std::string& query_id, RelevanceRule rule) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return 0;
  return static_cast<std::size_t>(std::count_if(q->second.begin(), q->second.end(), [&](const auto& kv) {
    return rule == RelevanceRule::grade_2 ? kv.second == 2 : kv.second >= 1;
  }));
}

std::vector<std::string> Qrels::queries() const {
  std::vector<std::string> out;
  for (const auto& [q, _] : grades_) out.push_back(q);
  return out;
}

std::vector<QrelsRow> Qrels::rows() const {
  std::vector<QrelsRow> out;
  for (const auto& [q, docs] : grades_) {
    for (const auto& [d, g] : docs) out.push_back({q, d, g});
  }
  return out;
}

std::size_t Qrels::size() const {
  std::size_t n = 0;
  for (const auto& [_, docs] : grades_) n += docs.size();
  return n;
}

Qrels Qrels::parse(std::istream& in) {
  Qrels q;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (skippable(line)) continue;
    auto f = fields_of(line);
    if (f.size() != 4) throw ValidationError("qrels line " + std::to_string(n) + " needs 4 fields");
    q.add({f[0], f[2], parse_int(f[3], "grade", n)});
  }
  return q;
}

Qrels Qrels::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot read qrels " + path.string());
  return parse(in);
}

void Qrels::write(std::ostream& out) const {
  for (const auto& r : rows()) out << r.query_id << " 0 " << r.doc_id << " " << r.grade << "\n";
}

void RunFile::add_query(const std::string& query_id, const std::vector<retrieval::RankedDoc>& docs,
                        const std::string& tag) {
  auto& rows = by_query_[query_id];
  if (!rows.empty()) throw ValidationError("run already has query " + query_id);
  int rank = 1;
  for (const auto& d : docs) rows.push_back({query_id, d.doc_id, rank++, round6(d.score), tag});
  check_query(query_id);
}

void RunFile::check_query(const std::string& query_id) const {
  const auto& rows = by_query_.at(query_id);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rank != static_cast<int>(i + 1)) {
      throw ValidationError("query " + query_id + ": ranks must be contiguous from 1");
    }
    if (i > 0 && rows[i].score > rows[i - 1].score) {
      throw ValidationError("query " + query_id + ": scores increase at rank " + std::to_string(rows[i].rank));
    }
    if (!seen.insert(rows[i].doc_id).second) throw ValidationError("query " + query_id + ": duplicate doc " + rows[i].doc_id);
  }
}

RunFile RunFile::parse(std::istream& in) {
  RunFile run;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (skippable(line)) continue;
    auto f = fields_of(line);
    if (f.size() != 6) throw ValidationError("run line " + std::to_string(n) + " needs 6 fields");
    run.by_query_[f[0]].push_back({f[0], f[2], parse_int(f[3], "rank", n), parse_double(f[4], "score", n), f[5]});
  }
  for (auto& [q, rows] : run.by_query_) {
    std::stable_sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) { return a.rank < b.rank; });
    run.check_query(q);
  }
  return run;
}

RunFile RunFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot read run file " + path.string());
  return parse(in);
}

void RunFile::write(std::ostream& out) const {
  for (const auto& [q, rows] : by_query_) {
    for (const auto& r : rows) {
      char score[48];
      std::snprintf(score, sizeof score, "%.6f", r.score);
      out << r.query_id << " Q0 " << r.doc_id << " " << r.rank << " " << score << " " << r.tag << "\n";
    }
  }
}

const std::vector<RunRow>& RunFile::rows(const std::string& query_id) const {
  auto it = by_query_.find(query_id);
  if (it == by_query_.end()) throw NotFoundError("run has no query '" + query_id + "'");
  return it->second;
}

std::vector<std::string> RunFile::queries() const {
  std::vector<std::string> out;
  for (const auto& [q, _] : by_query_) out.push_back(q);
  return out;
}

std::string RunFile::tag() const {
  for (const auto& [_, rows] : by_query_) {
    if (!rows.empty()) return rows.front().tag;
  }
  return "";
}

std::map<std::string, std::vector<std::string>> pool(const std::vector<RunFile>& runs, std::size_t depth,
                                                     std::size_t cap) {
  std::set<std::string> queries;
  for (const auto& r : runs) {
    for (const auto& q : r.queries()) queries.insert(q);
  }
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& q : queries) {
    auto& docs = out[q];
    std::set<std::string> seen;
    for (std::size_t rank = 0; rank < depth && docs.size() < cap; ++rank) {
      for (const auto& run : runs) {
        if (!run.has_query(q)) continue;
        const auto& rows = run.rows(q);
        if (rank >= rows.size()) continue;
        if (seen.insert(rows[rank].doc_id).second) {
          docs.push_back(rows[rank].doc_id);
          if (docs.size() == cap) break;
        }
      }
    }
  }
  return out;
}

double precision_at_k(const RunFile& run, const std::string& query_id, const Qrels& qrels, std::size_t k,
                      RelevanceRule rule) {
  if (k == 0) throw ValidationError("k must be positive");
  return static_cast<double>(hits_in_top_k(run, query_id, qrels, k, rule)) / static_cast<double>(k);
}

std::optional<double> recall_at_k(const RunFile& run, const std::string& query_id, const Qrels& qrels, std::size_t k,
                                  RelevanceRule rule) {
  if (k == 0) throw ValidationError("k must be positive");
  const auto hits = hits_in_top_k(run, query_id, qrels, k, rule);
  const auto relevant = qrels.relevant_count(query_id, rule);
  if (relevant == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(relevant);
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::string Aggregate::format() const { return fmt3(mean) + " ± " + fmt3(std); }

Aggregate aggregate(const std::vector<double>& values, bool population) {
  if (values.empty()) throw ValidationError("aggregate needs at least one value");
  if (!population && values.size() < 2) throw ValidationError("sample deviation needs at least two values");
  Aggregate a;
  a.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(a.n);
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(sq / static_cast<double>(population ? a.n : a.n - 1));
  return a;
}

MetricRow evaluate_run(const RunFile& run, const Qrels& qrels, std::size_t k, RelevanceRule rule, bool population) {
  MetricRow row;
  row.variant_tag = run.tag();
  const auto judged = qrels.queries();
  std::vector<double> ps, rs, fs;
  for (const auto& q : run.queries()) {
    if (!std::binary_search(judged.begin(), judged.end(), q)) continue;
    QueryMetrics m;
    m.query_id = q;
    m.p = precision_at_k(run, q, qrels, k, rule);
    ps.push_back(m.p);
    m.r = recall_at_k(run, q, qrels, k, rule);
    if (m.r) {
      m.f = f1(m.p, *m.r);
      rs.push_back(*m.r);
      fs.push_back(*m.f);
    } else {
      row.excluded_queries.push_back(q);
    }
    row.per_query.push_back(std::move(m));
  }
  if (ps.empty()) throw ValidationError("run " + row.variant_tag + " shares no query with the qrels");
  row.p = aggregate(ps, population);
  if (!rs.empty()) {
    row.r = aggregate(rs, population);
    row.f1 = aggregate(fs, population);
  }
  return row;
}

std::string metrics_csv(const std::vector<MetricRow>& rows, std::size_t k) {
  const auto ks = std::to_string(k);
  std::ostringstream out;
  out << "variant,p_at_" << ks << "_mean,p_at_" << ks << "_std,r_at_" << ks << "_mean,r_at_" << ks << "_std,f1_at_"
      << ks << "_mean,f1_at_" << ks << "_std,queries,excluded_queries\n";
  for (const auto& r : rows) {
    out << r.variant_tag << "," << fmt3(r.p.mean) << "," << fmt3(r.p.std) << "," << fmt3(r.r.mean) << ","
        << fmt3(r.r.std) << "," << fmt3(r.f1.mean) << "," << fmt3(r.f1.std) << "," << r.per_query.size() << ","
        << r.excluded_queries.size() << "\n";
  }
  return out.str();
}

std::string metrics_markdown(const std::vector<MetricRow>& rows, std::size_t k) {
  const auto ks = std::to_string(k);
  std::ostringstream out;
  out << "| System Variant | P@" << ks << " | R@" << ks << " | F1@" << ks << " |\n";
  out << "| --- | --- | --- | --- |\n";
  for (const auto& r : rows) {
    out << "| " << r.variant_tag << " | " << r.p.format() << " | " << r.r.format() << " | " << r.f1.format() << " |\n";
  }
  return out.str();
}

}  // namespace harness::eval
