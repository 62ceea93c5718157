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

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace harness::retrieval {

struct Passage {
  std::string chunk_id;
  std::string text;
  double best_query_sim = 0.0;
};

// Joint query/passage relevance scorer. Must be concurrently callable.
class CrossEncoder {
 public:
  virtual ~CrossEncoder() = default;
  virtual std::string backend_id() const = 0;
  // One score per passage, same order.
  virtual std::vector<double> score(const std::string& query, std::span<const Passage> passages) const = 0;
};

// |tokens(q) ∩ tokens(c)| / |tokens(q) ∪ tokens(c)| over lowercased token sets.
double token_jaccard(const std::string& a, const std::string& b);

class JaccardCrossEncoder final : public CrossEncoder {
 public:
  std::string backend_id() const override { return "mock-jaccard"; }
  std::vector<double> score(const std::string& query, std::span<const Passage> passages) const override;
};

// Scores each passage with its best_query_sim, so reranking leaves the
// first-stage order intact.
class IdentityCrossEncoder final : public CrossEncoder {
 public:
  std::string backend_id() const override { return "identity"; }
  std::vector<double> score(const std::string& query, std::span<const Passage> passages) const override;
};

// Remote contract: POST {"query", "passages": [...]} -> {"scores": [...]}.
class HttpCrossEncoder final : public CrossEncoder {
 public:
  explicit HttpCrossEncoder(std::string url) : url_(std::move(url)) {}
  std::string backend_id() const override { return "http:" + url_; }
  std::vector<double> score(const std::string& query, std::span<const Passage> passages) const override;

 private:
  std::string url_;
};

// "mock" / "jaccard", "identity" or "http:<url>".
std::shared_ptr<CrossEncoder> make_cross_encoder(const std::string& spec);

}  // namespace harness::retrieval
