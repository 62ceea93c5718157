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

// Serial reference against the OpenMP kernels for exact cosine top-K.
//
//   topk_bench --benchmark_filter=Cosine
//
// Arguments are {rows, dim}; OMP_NUM_THREADS controls the parallel width.

#include <benchmark/benchmark.h>

#include <cstdio>
#include <random>
#include <vector>

#include "harness/index/kernels.hpp"

namespace {

using namespace harness::index::kernels;

struct Corpus {
  std::vector<float> data;
  std::vector<double> norms;
  std::vector<double> query;
  std::vector<std::string> ids;
  std::size_t dim;

  Corpus(std::size_t rows, std::size_t d) : data(rows * d), norms(rows), query(d), ids(rows), dim(d) {
    std::mt19937_64 rng(42);
    std::normal_distribution<float> n(0.0f, 1.0f);
    for (auto& x : data) x = n(rng);
    for (auto& x : query) x = n(rng);
    row_norms_serial(data, dim, norms);
    char buf[32];
    for (std::size_t i = 0; i < rows; ++i) {
      std::snprintf(buf, sizeof buf, "DOC-%06zu#0000", i);
      ids[i] = buf;
    }
  }
  MatrixView view() const { return {data, norms, dim}; }
};

template <void (*Kernel)(const MatrixView&, std::span<const double>, std::span<double>)>
void BM_Cosine(benchmark::State& state) {
  const Corpus c(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::vector<double> out(c.norms.size());
  for (auto _ : state) {
    Kernel(c.view(), c.query, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = max_threads();
}

template <std::vector<Scored> (*Select)(std::span<const double>, std::span<const std::string>, std::size_t)>
void BM_TopK(benchmark::State& state) {
  const Corpus c(static_cast<std::size_t>(state.range(0)), 64);
  std::vector<double> scores(c.norms.size());
  cosine_scores_serial(c.view(), c.query, scores);
  for (auto _ : state) benchmark::DoNotOptimize(Select(scores, c.ids, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long rows : {1 << 12, 1 << 15, 1 << 17}) {
    for (long dim : {64, 384}) b->Args({rows, dim});
  }
}

BENCHMARK(BM_Cosine<cosine_scores_serial>)->Name("Cosine/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(BM_Cosine<cosine_scores_parallel>)->Name("Cosine/parallel")->Apply(sizes)->UseRealTime();
BENCHMARK(BM_TopK<select_top_k_reference>)->Name("TopK/full_sort")->Arg(1 << 12)->Arg(1 << 17);
BENCHMARK(BM_TopK<select_top_k>)->Name("TopK/partial_sort")->Arg(1 << 12)->Arg(1 << 17);

}  // namespace
BENCHMARK_MAIN();
