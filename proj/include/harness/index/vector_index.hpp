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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "harness/index/embedding.hpp"
#include "harness/index/kernels.hpp"

namespace harness::corpus {
class CorpusStore;
}

namespace harness::index {

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;

  bool operator==(const SearchHit&) const = default;
};

enum class ScoringPath { parallel, serial_reference };

// Exact cosine top-K store. Vectors are held as float32 (the persisted
// precision) so a loaded index answers exactly like the one that was saved.
// Immutable once built; concurrent queries are safe.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(EmbeddingBackendDescriptor backend);

  // Throws ValidationError on a duplicate id, a dim mismatch or a zero vector.
  void add(const std::string& chunk_id, const EmbeddingVector& v);

  // K highest-cosine entries (all of them when K exceeds the size), score
  // descending, ties by ascending chunk_id. Empty index gives no hits.
  std::vector<SearchHit> top_k(const EmbeddingVector& query, std::size_t k,
                               ScoringPath path = ScoringPath::parallel) const;

  // Cosine of the query against every entry, in insertion order.
  std::vector<double> score_all(const EmbeddingVector& query, ScoringPath path = ScoringPath::parallel) const;

  std::optional<EmbeddingVector> vector(const std::string& chunk_id) const;
  double cosine_to(const std::string& chunk_id, const EmbeddingVector& query) const;

  const EmbeddingBackendDescriptor& backend() const { return backend_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return backend_.dim; }
  bool empty() const { return ids_.empty(); }
  kernels::MatrixView view() const { return {data_, norms_, backend_.dim}; }

  // <prefix>.vecs holds little-endian float32 rows; <prefix>.meta.json holds
  // the backend descriptor and the chunk ids in row order.
  void save(const std::filesystem::path& prefix) const;
  static VectorIndex load(const std::filesystem::path& prefix);

 private:
  void check_query(const EmbeddingVector& query) const;

  EmbeddingBackendDescriptor backend_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> row_of_;
};

// Embeds every chunk of the store in batches.
VectorIndex build_index(const corpus::CorpusStore& store, const Embedder& embedder, std::size_t batch_size = 64);

}  // namespace harness::index
