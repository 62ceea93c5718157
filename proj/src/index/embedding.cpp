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

#include "harness/index/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"
#include "harness/common/http_client.hpp"
#include "harness/corpus/text.hpp"

namespace harness::index {

double EmbeddingVector::norm() const {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw ValidationError("dimension mismatch: " + std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ValidationError("cosine of a zero-norm vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

json to_json(const EmbeddingBackendDescriptor& d) {
  return {{"backend_id", d.backend_id}, {"dim", d.dim}, {"kind", d.kind == BackendKind::mock ? "mock" : "remote"}};
}

EmbeddingBackendDescriptor descriptor_from_json(const json& j) {
  EmbeddingBackendDescriptor d;
  d.backend_id = j.at("backend_id").get<std::string>();
  d.dim = j.at("dim").get<std::size_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "mock" && kind != "remote") throw ValidationError("unknown backend kind '" + kind + "'");
  d.kind = kind == "mock" ? BackendKind::mock : BackendKind::remote;
  return d;
}

EmbeddingVector Embedder::embed(std::string_view text) const {
  auto out = embed_batch({std::string(text)});
  return std::move(out.at(0));
}

EmbeddingVector mock_embed(std::string_view text, std::size_t dim) {
  EmbeddingVector v;
  v.values.assign(dim, 0.0);
  for (const auto& token : corpus::lower_tokens(text)) {
    v.values[fnv1a64(token) % dim] += 1.0;
  }
  const double n = v.norm();
  if (n > 0.0) {
    for (auto& x : v.values) x /= n;
  }
  return v;
}

MockEmbedder::MockEmbedder(std::size_t dim) {
  if (dim < 8) throw ValidationError("mock embedder needs dim >= 8");
  descriptor_ = {"mock-" + std::to_string(dim), dim, BackendKind::mock};
}

std::vector<EmbeddingVector> MockEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto norm_text = corpus::normalize(t);
    if (norm_text.empty()) throw ValidationError("cannot embed empty text");
    out.push_back(mock_embed(norm_text, descriptor_.dim));
  }
  return out;
}

HttpEmbedder::HttpEmbedder(std::string backend_id, std::string url, std::size_t batch_size)
    : url_(std::move(url)), batch_size_(std::max<std::size_t>(1, batch_size)) {
  descriptor_.backend_id = std::move(backend_id);
  descriptor_.kind = BackendKind::remote;
  auto probe = post({"dimension probe"});
  descriptor_.dim = probe.at(0).dim();
  if (descriptor_.dim == 0) throw Error(ErrorCode::internal, "embedding backend reported dim 0");
}

std::vector<EmbeddingVector> HttpEmbedder::post(const std::vector<std::string>& texts) const {
  json response = post_json(url_, {{"texts", texts}});
  const auto& vectors = response.at("vectors");
  if (!vectors.is_array() || vectors.size() != texts.size()) {
    throw Error(ErrorCode::internal, "embedding backend returned wrong number of vectors");
  }
  std::vector<EmbeddingVector> out;
  for (const auto& row : vectors) {
    EmbeddingVector v;
    for (const auto& x : row) {
      double d = x.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorCode::internal, "embedding backend returned a non-finite value");
      v.values.push_back(d);
    }
    if (descriptor_.dim != 0 && v.dim() != descriptor_.dim) {
      throw Error(ErrorCode::internal, "embedding backend returned dim " + std::to_string(v.dim()) +
                                           ", declared " + std::to_string(descriptor_.dim));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += batch_size_) {
    std::vector<std::string> batch;
    for (std::size_t j = i; j < std::min(texts.size(), i + batch_size_); ++j) {
      auto t = corpus::normalize(texts[j]);
      if (t.empty()) throw ValidationError("cannot embed empty text");
      batch.push_back(std::move(t));
    }
    auto vs = post(batch);
    std::move(vs.begin(), vs.end(), std::back_inserter(out));
  }
  return out;
}

std::shared_ptr<Embedder> make_embedder(const std::string& backend_id) {
  if (backend_id == "mock") return std::make_shared<MockEmbedder>(64);
  if (backend_id.rfind("mock-", 0) == 0) {
    const auto digits = backend_id.substr(5);
    if (digits.empty() || digits.size() > 6 || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("bad mock dimension in '" + backend_id + "'");
    }
    return std::make_shared<MockEmbedder>(static_cast<std::size_t>(std::stoul(digits)));
  }
  if (backend_id.rfind("http:", 0) == 0) {
    return std::make_shared<HttpEmbedder>(backend_id, backend_id.substr(5));
  }
  throw ValidationError("unknown embedding backend '" + backend_id + "'");
}

}  // namespace harness::index
