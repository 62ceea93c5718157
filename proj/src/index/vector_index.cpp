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

#include "harness/index/vector_index.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "harness/common/error.hpp"
#include "harness/corpus/corpus_store.hpp"

namespace harness::index {

namespace fs = std::filesystem;

namespace {

fs::path with_suffix(const fs::path& prefix, const char* suffix) {
  fs::path p = prefix;
  p += suffix;
  return p;
}

void put_f32_le(std::ostream& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  unsigned char b[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                        static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

float get_f32_le(const unsigned char* b) {
  std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                       (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

VectorIndex::VectorIndex(EmbeddingBackendDescriptor backend) : backend_(std::move(backend)) {}

void VectorIndex::add(const std::string& chunk_id, const EmbeddingVector& v) {
  if (v.dim() != backend_.dim) {
    throw ValidationError("dimension mismatch: index " + std::to_string(backend_.dim) + ", vector " +
                          std::to_string(v.dim()));
  }
  if (row_of_.count(chunk_id) != 0) throw ValidationError("duplicate chunk_id '" + chunk_id + "'");
  double sq = 0.0;
  for (double x : v.values) {
    if (!std::isfinite(x)) throw ValidationError("non-finite embedding value for '" + chunk_id + "'");
    const auto f = static_cast<float>(x);
    data_.push_back(f);
    sq += static_cast<double>(f) * f;
  }
  if (sq == 0.0) {
    data_.resize(data_.size() - v.dim());
    throw ValidationError("zero-norm embedding for '" + chunk_id + "'");
  }
  row_of_.emplace(chunk_id, ids_.size());
  ids_.push_back(chunk_id);
  norms_.push_back(std::sqrt(sq));
}

void VectorIndex::check_query(const EmbeddingVector& query) const {
  if (query.dim() != backend_.dim) {
    throw ValidationError("dimension mismatch: index " + std::to_string(backend_.dim) + ", query " +
                          std::to_string(query.dim()));
  }
  if (query.norm() == 0.0) throw ValidationError("zero-norm query");
}

std::vector<double> VectorIndex::score_all(const EmbeddingVector& query, ScoringPath path) const {
  check_query(query);
  std::vector<double> scores(size());
  if (path == ScoringPath::parallel) {
    kernels::cosine_scores_parallel(view(), query.values, scores);
  } else {
    kernels::cosine_scores_serial(view(), query.values, scores);
  }
  return scores;
}

std::vector<SearchHit> VectorIndex::top_k(const EmbeddingVector& query, std::size_t k, ScoringPath path) const {
  if (k == 0) throw ValidationError("K must be >= 1");
  if (empty()) return {};
  const auto scores = score_all(query, path);
  const auto best = path == ScoringPath::parallel ? kernels::select_top_k(scores, ids_, k)
                                                  : kernels::select_top_k_reference(scores, ids_, k);
  std::vector<SearchHit> hits;
  hits.reserve(best.size());
  for (const auto& s : best) hits.push_back({ids_[s.row], s.score});
  return hits;
}

std::optional<EmbeddingVector> VectorIndex::vector(const std::string& chunk_id) const {
  auto it = row_of_.find(chunk_id);
  if (it == row_of_.end()) return std::nullopt;
  EmbeddingVector v;
  const float* row = data_.data() + it->second * backend_.dim;
  v.values.assign(row, row + backend_.dim);
  return v;
}

double VectorIndex::cosine_to(const std::string& chunk_id, const EmbeddingVector& query) const {
  auto v = vector(chunk_id);
  if (!v) throw NotFoundError("chunk '" + chunk_id + "' not in index");
  return cosine(*v, query);
}

void VectorIndex::save(const fs::path& prefix) const {
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  {
    std::ofstream out(with_suffix(prefix, ".vecs"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::internal, "cannot write " + with_suffix(prefix, ".vecs").string());
    for (float f : data_) put_f32_le(out, f);
  }
  json meta = {{"backend", to_json(backend_)},
               {"chunk_ids", ids_},
               {"count", ids_.size()},
               {"format", "f32le"}};
  std::ofstream m(with_suffix(prefix, ".meta.json"), std::ios::trunc);
  m << canonical_dump_pretty(meta);
}

VectorIndex VectorIndex::load(const fs::path& prefix) {
  std::ifstream m(with_suffix(prefix, ".meta.json"));
  if (!m) throw NotFoundError("index not found at " + prefix.string() + " (run `harness index build`)");
  json meta = json::parse(m);
  if (meta.value("format", "") != "f32le") throw ValidationError("unsupported index format");
  VectorIndex index(descriptor_from_json(meta.at("backend")));
  const auto ids = meta.at("chunk_ids").get<std::vector<std::string>>();
  const std::size_t dim = index.dim();

  std::ifstream in(with_suffix(prefix, ".vecs"), std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != ids.size() * dim * 4) throw ValidationError("index .vecs size does not match metadata");

  for (std::size_t r = 0; r < ids.size(); ++r) {
    EmbeddingVector v;
    v.values.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) v.values[j] = get_f32_le(&bytes[(r * dim + j) * 4]);
    index.add(ids[r], v);
  }
  return index;
}

VectorIndex build_index(const corpus::CorpusStore& store, const Embedder& embedder, std::size_t batch_size) {
  VectorIndex index(embedder.descriptor());
  const auto& chunks = store.chunks();
  for (std::size_t i = 0; i < chunks.size(); i += batch_size) {
    std::vector<std::string> texts;
    const std::size_t end = std::min(chunks.size(), i + batch_size);
    for (std::size_t j = i; j < end; ++j) texts.push_back(chunks[j].text);
    auto vectors = embedder.embed_batch(texts);
    for (std::size_t j = i; j < end; ++j) index.add(chunks[j].chunk_id, vectors[j - i]);
  }
  return index;
}

}  // namespace harness::index
