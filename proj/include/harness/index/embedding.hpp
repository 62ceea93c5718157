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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "harness/common/canonical_json.hpp"

namespace harness::index {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  double norm() const;
  bool operator==(const EmbeddingVector&) const = default;
};

// dot(u, v) / (|u| |v|). Throws ValidationError on a dimension mismatch or a
// zero-norm input. Clamped to [-1, 1] against rounding overshoot.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

enum class BackendKind { remote, mock };

struct EmbeddingBackendDescriptor {
  std::string backend_id;
  std::size_t dim = 0;
  BackendKind kind = BackendKind::mock;

  bool operator==(const EmbeddingBackendDescriptor&) const = default;
};

json to_json(const EmbeddingBackendDescriptor& d);
EmbeddingBackendDescriptor descriptor_from_json(const json& j);

// Text embedding behind a backend contract. Implementations must be safe for
// concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual const EmbeddingBackendDescriptor& descriptor() const = 0;

  // Throws ValidationError for text that is empty after normalization and
  // TransportError when a remote backend cannot be reached.
  virtual EmbeddingVector embed(std::string_view text) const;
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const = 0;
};

// Token-hash bag of words: every lowercased token is hashed with 64-bit
// FNV-1a into bucket hash % dim; the bucket counts are L2-normalized.
EmbeddingVector mock_embed(std::string_view text, std::size_t dim);

class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t dim = 64);
  const EmbeddingBackendDescriptor& descriptor() const override { return descriptor_; }
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  EmbeddingBackendDescriptor descriptor_;
};

// Remote contract: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
// Batches of at most `batch_size` texts per request. The dimension is taken
// from a probe request at construction.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string backend_id, std::string url, std::size_t batch_size = 64);
  const EmbeddingBackendDescriptor& descriptor() const override { return descriptor_; }
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  std::vector<EmbeddingVector> post(const std::vector<std::string>& texts) const;

  std::string url_;
  std::size_t batch_size_;
  EmbeddingBackendDescriptor descriptor_;
};

// "mock" / "mock-<dim>" or "http:<url>".
std::shared_ptr<Embedder> make_embedder(const std::string& backend_id);

}  // namespace harness::index
