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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "harness/corpus/chunker.hpp"
#include "harness/corpus/document.hpp"

namespace harness::corpus {

struct WordStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double median = 0.0;
  std::size_t max = 0;
};

WordStats compute_word_stats(const std::vector<std::size_t>& counts);

struct RejectedRecord {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct CorpusStats {
  std::size_t doc_count = 0;
  std::size_t chunk_count = 0;
  WordStats summary_word_stats;
  WordStats body_word_stats;
  std::vector<std::string> undated;  // doc_ids without event_date
  std::vector<RejectedRecord> rejected;
};

json to_json(const CorpusStats& stats);
CorpusStats compute_stats(const std::vector<Document>& docs, std::size_t chunk_count);

enum class CorpusKind { incidents, policies };

// On-disk document/chunk store. Single writer; after loading, any number of
// concurrent readers.
class CorpusStore {
 public:
  CorpusStore() = default;

  // Opens (creating if needed) the store rooted at `dir`.
  static CorpusStore open(const std::filesystem::path& dir, CorpusKind kind = CorpusKind::incidents);

  // Parses JSON Lines. Malformed lines are collected with their line numbers
  // and skipped; a duplicate doc_id (within the file or against the store)
  // aborts the whole ingest with nothing persisted. If `policy` differs from
  // the store's current policy every stored document is re-chunked.
  CorpusStats ingest(const std::filesystem::path& file, std::optional<ChunkingPolicy> policy = std::nullopt);
  CorpusStats ingest_stream(std::istream& in, std::optional<ChunkingPolicy> policy = std::nullopt);

  // Adds documents already in memory (used for fixtures and work plans).
  CorpusStats add(const std::vector<Document>& docs);

  const std::vector<Document>& documents() const { return docs_; }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  const Document* find(const std::string& doc_id) const;
  const Chunk* find_chunk(const std::string& chunk_id) const;
  std::vector<const Chunk*> chunks_of(const std::string& doc_id) const;
  const ChunkingPolicy& policy() const { return policy_; }
  CorpusKind kind() const { return kind_; }
  bool empty() const { return docs_.empty(); }

  // One canonical JSON line per document, in ingestion order.
  void export_jsonl(std::ostream& out) const;
  CorpusStats stats() const;

  // In-memory store (no directory); used by tests and ad-hoc tools.
  static CorpusStore in_memory(ChunkingPolicy policy = {}, CorpusKind kind = CorpusKind::incidents);

 private:
  void rebuild_lookup();
  void persist() const;
  void load();

  std::filesystem::path dir_;
  CorpusKind kind_ = CorpusKind::incidents;
  ChunkingPolicy policy_;
  std::vector<Document> docs_;
  std::vector<Chunk> chunks_;
  std::unordered_map<std::string, std::size_t> doc_pos_;
  std::unordered_map<std::string, std::size_t> chunk_pos_;
};

}  // namespace harness::corpus
