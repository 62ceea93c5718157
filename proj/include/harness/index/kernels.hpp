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
#include <span>
#include <string>
#include <vector>

namespace harness::index::kernels {

// Row-major matrix of `rows` float32 vectors of width `dim`, plus the
// precomputed L2 norm of every row.
struct MatrixView {
  std::span<const float> data;
  std::span<const double> norms;
  std::size_t dim = 0;

  std::size_t rows() const { return norms.size(); }
};

// out[r] = cosine(query, row r), accumulated in double in index order so the
// two variants agree bit for bit.
void cosine_scores_serial(const MatrixView& m, std::span<const double> query, std::span<double> out);
void cosine_scores_parallel(const MatrixView& m, std::span<const double> query, std::span<double> out);

// Row norms, computed in double from the float data.
void row_norms_serial(std::span<const float> data, std::size_t dim, std::span<double> out);
void row_norms_parallel(std::span<const float> data, std::size_t dim, std::span<double> out);

struct Scored {
  std::size_t row = 0;
  double score = 0.0;
};

// The k best rows ordered by score descending, ties by ascending id.
// The reference variant sorts everything; the fast one partial-sorts.
std::vector<Scored> select_top_k_reference(std::span<const double> scores, std::span<const std::string> ids,
                                           std::size_t k);
std::vector<Scored> select_top_k(std::span<const double> scores, std::span<const std::string> ids, std::size_t k);

int max_threads();

}  // namespace harness::index::kernels
