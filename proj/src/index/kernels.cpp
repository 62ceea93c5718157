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

#include "harness/index/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace harness::index::kernels {
namespace {

inline double query_norm(std::span<const double> q) {
  double sq = 0.0;
  for (double v : q) sq += v * v;
  return std::sqrt(sq);
}

inline double row_cosine(const float* row, std::span<const double> q, std::size_t dim, double row_norm,
                         double q_norm) {
  double dot = 0.0;
  for (std::size_t j = 0; j < dim; ++j) dot += static_cast<double>(row[j]) * q[j];
  double c = dot / (row_norm * q_norm);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace

void cosine_scores_serial(const MatrixView& m, std::span<const double> query, std::span<double> out) {
  const double qn = query_norm(query);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out[r] = row_cosine(m.data.data() + r * m.dim, query, m.dim, m.norms[r], qn);
  }
}

void cosine_scores_parallel(const MatrixView& m, std::span<const double> query, std::span<double> out) {
  const double qn = query_norm(query);
  const auto rows = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    out[i] = row_cosine(m.data.data() + i * m.dim, query, m.dim, m.norms[i], qn);
  }
}

void row_norms_serial(std::span<const float> data, std::size_t dim, std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sq += static_cast<double>(data[r * dim + j]) * data[r * dim + j];
    out[r] = std::sqrt(sq);
  }
}

void row_norms_parallel(std::span<const float> data, std::size_t dim, std::span<double> out) {
  const auto rows = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sq += static_cast<double>(data[i * dim + j]) * data[i * dim + j];
    out[i] = std::sqrt(sq);
  }
}

std::vector<Scored> select_top_k_reference(std::span<const double> scores, std::span<const std::string> ids,
                                           std::size_t k) {
  std::vector<Scored> all;
  all.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) all.push_back({i, scores[i]});
  std::sort(all.begin(), all.end(), [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return ids[a.row] < ids[b.row];
  });
  all.resize(std::min(k, all.size()));
  return all;
}

std::vector<Scored> select_top_k(std::span<const double> scores, std::span<const std::string> ids, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);
  std::vector<Scored> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({order[i], scores[order[i]]});
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace harness::index::kernels
