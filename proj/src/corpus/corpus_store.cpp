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

#include "harness/corpus/corpus_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::corpus {

namespace fs = std::filesystem;

WordStats compute_word_stats(const std::vector<std::size_t>& counts) {
  WordStats s;
  if (counts.empty()) return s;
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c);
  s.mean = sum / static_cast<double>(counts.size());
  double sq = 0.0;
  for (auto c : counts) sq += (static_cast<double>(c) - s.mean) * (static_cast<double>(c) - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(counts.size()));
  auto sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                        : (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
  s.max = sorted.back();
  return s;
}

namespace {

json to_json(const WordStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"median", s.median}, {"max", s.max}};
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::internal, "cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void check_policy_doc(const Document& doc) {
  if (!doc.origin || (*doc.origin != "sbms" && *doc.origin != "external")) {
    throw ValidationError("policy '" + doc.doc_id + "' needs origin 'sbms' or 'external'");
  }
}

}  // namespace

json to_json(const CorpusStats& stats) {
  json rejected = json::array();
  for (const auto& r : stats.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
  return {{"doc_count", stats.doc_count},
          {"chunk_count", stats.chunk_count},
          {"summary_word_stats", to_json(stats.summary_word_stats)},
          {"body_word_stats", to_json(stats.body_word_stats)},
          {"undated", stats.undated},
          {"rejected", rejected}};
}

CorpusStats compute_stats(const std::vector<Document>& docs, std::size_t chunk_count) {
  CorpusStats stats;
  stats.doc_count = docs.size();
  stats.chunk_count = chunk_count;
  std::vector<std::size_t> summary_words, body_words;
  for (const auto& d : docs) {
    summary_words.push_back(word_count(d.summary));
    body_words.push_back(word_count(d.body));
    if (!d.event_date) stats.undated.push_back(d.doc_id);
  }
  stats.summary_word_stats = compute_word_stats(summary_words);
  stats.body_word_stats = compute_word_stats(body_words);
  return stats;
}

CorpusStore CorpusStore::open(const fs::path& dir, CorpusKind kind) {
  CorpusStore store;
  store.dir_ = dir;
  store.kind_ = kind;
  fs::create_directories(dir);
  store.load();
  return store;
}

CorpusStore CorpusStore::in_memory(ChunkingPolicy policy, CorpusKind kind) {
  policy.validate();
  CorpusStore store;
  store.policy_ = std::move(policy);
  store.kind_ = kind;
  return store;
}

void CorpusStore::load() {
  const fs::path manifest = dir_ / "manifest.json";
  if (!fs::exists(manifest)) return;
  std::ifstream m(manifest);
  json j = json::parse(m);
  policy_ = chunking_policy_from_json(j.at("policy"));
  std::ifstream docs(dir_ / "documents.jsonl");
  for (std::string line; std::getline(docs, line);) {
    if (!line.empty()) docs_.push_back(document_from_json(json::parse(line)));
  }
  std::ifstream chunks(dir_ / "chunks.jsonl");
  for (std::string line; std::getline(chunks, line);) {
    if (!line.empty()) chunks_.push_back(chunk_from_json(json::parse(line)));
  }
  rebuild_lookup();
}

void CorpusStore::persist() const {
  if (dir_.empty()) return;
  std::ostringstream docs;
  export_jsonl(docs);
  std::ostringstream chunks;
  for (const auto& c : chunks_) chunks << canonical_dump(to_json(c)) << '\n';
  write_atomic(dir_ / "documents.jsonl", docs.str());
  write_atomic(dir_ / "chunks.jsonl", chunks.str());
  json manifest = {{"policy", to_json(policy_)},
                   {"doc_count", docs_.size()},
                   {"chunk_count", chunks_.size()},
                   {"kind", kind_ == CorpusKind::policies ? "policies" : "incidents"}};
  write_atomic(dir_ / "manifest.json", canonical_dump_pretty(manifest));
}

void CorpusStore::rebuild_lookup() {
  doc_pos_.clear();
  chunk_pos_.clear();
  for (std::size_t i = 0; i < docs_.size(); ++i) doc_pos_[docs_[i].doc_id] = i;
  for (std::size_t i = 0; i < chunks_.size(); ++i) chunk_pos_[chunks_[i].chunk_id] = i;
}

CorpusStats CorpusStore::ingest(const fs::path& file, std::optional<ChunkingPolicy> policy) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read corpus file " + file.string());
  return ingest_stream(in, std::move(policy));
}

CorpusStats CorpusStore::ingest_stream(std::istream& in, std::optional<ChunkingPolicy> policy) {
  std::vector<Document> batch;
  std::vector<RejectedRecord> rejected;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (normalize(line).empty()) continue;
    Document doc;
    try {
      doc = normalized(document_from_json(json::parse(line)));
      if (kind_ == CorpusKind::policies) check_policy_doc(doc);
    } catch (const json::exception& e) {
      rejected.push_back({line_no, std::string("malformed JSON: ") + e.what()});
      continue;
    } catch (const ValidationError& e) {
      rejected.push_back({line_no, e.what()});
      continue;
    }
    if (auto it = first_line.find(doc.doc_id); it != first_line.end()) {
      throw ValidationError("duplicate doc_id '" + doc.doc_id + "' on lines " + std::to_string(it->second) +
                            " and " + std::to_string(line_no));
    }
    if (doc_pos_.count(doc.doc_id) != 0) {
      throw ValidationError("duplicate doc_id '" + doc.doc_id + "' on line " + std::to_string(line_no) +
                            " already present in the store");
    }
    first_line.emplace(doc.doc_id, line_no);
    batch.push_back(std::move(doc));
  }

  if (policy && !(*policy == policy_)) {
    policy->validate();
    policy_ = *policy;
    chunks_.clear();
    for (const auto& d : docs_) {
      auto cs = chunk(d, policy_);
      chunks_.insert(chunks_.end(), cs.begin(), cs.end());
    }
  }
  CorpusStats stats = add(batch);
  stats.rejected = std::move(rejected);
  return stats;
}

CorpusStats CorpusStore::add(const std::vector<Document>& input) {
  std::vector<Document> batch;
  std::vector<Chunk> new_chunks;
  for (const auto& raw : input) {
    Document doc = normalized(raw);
    if (kind_ == CorpusKind::policies) check_policy_doc(doc);
    if (doc_pos_.count(doc.doc_id) != 0) throw ValidationError("duplicate doc_id '" + doc.doc_id + "'");
    auto cs = chunk(doc, policy_);
    new_chunks.insert(new_chunks.end(), cs.begin(), cs.end());
    batch.push_back(std::move(doc));
  }
  const std::size_t chunk_count = new_chunks.size();
  docs_.insert(docs_.end(), batch.begin(), batch.end());
  chunks_.insert(chunks_.end(), std::make_move_iterator(new_chunks.begin()),
                 std::make_move_iterator(new_chunks.end()));
  rebuild_lookup();
  persist();
  return compute_stats(batch, chunk_count);
}

const Document* CorpusStore::find(const std::string& doc_id) const {
  auto it = doc_pos_.find(doc_id);
  return it == doc_pos_.end() ? nullptr : &docs_[it->second];
}

const Chunk* CorpusStore::find_chunk(const std::string& chunk_id) const {
  auto it = chunk_pos_.find(chunk_id);
  return it == chunk_pos_.end() ? nullptr : &chunks_[it->second];
}

std::vector<const Chunk*> CorpusStore::chunks_of(const std::string& doc_id) const {
  std::vector<const Chunk*> out;
  for (std::size_t seq = 0;; ++seq) {
    const Chunk* c = find_chunk(make_chunk_id(doc_id, seq));
    if (!c) break;
    out.push_back(c);
  }
  return out;
}

void CorpusStore::export_jsonl(std::ostream& out) const {
  for (const auto& d : docs_) out << canonical_dump(to_json(d)) << '\n';
}

CorpusStats CorpusStore::stats() const { return compute_stats(docs_, chunks_.size()); }

}  // namespace harness::corpus
