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

#include "harness/retrieval/cross_encoder.hpp"

#include <cmath>
#include <set>

#include "harness/common/canonical_json.hpp"
#include "harness/common/error.hpp"
#include "harness/common/http_client.hpp"
#include "harness/corpus/text.hpp"

namespace harness::retrieval {

double token_jaccard(const std::string& a, const std::string& b) {
  const auto ta = corpus::lower_tokens(a);
  const auto tb = corpus::lower_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> JaccardCrossEncoder::score(const std::string& query, std::span<const Passage> passages) const {
  std::vector<double> out;
  out.reserve(passages.size());
  for (const auto& p : passages) out.push_back(token_jaccard(query, p.text));
  return out;
}

std::vector<double> IdentityCrossEncoder::score(const std::string&, std::span<const Passage> passages) const {
  std::vector<double> out;
  out.reserve(passages.size());
  for (const auto& p : passages) out.push_back(p.best_query_sim);
  return out;
}

std::vector<double> HttpCrossEncoder::score(const std::string& query, std::span<const Passage> passages) const {
  json texts = json::array();
  for (const auto& p : passages) texts.push_back(p.text);
  json response = post_json(url_, {{"query", query}, {"passages", texts}});
  const auto& scores = response.at("scores");
  if (!scores.is_array() || scores.size() != passages.size()) {
    throw Error(ErrorCode::backend_unavailable, "cross-encoder returned wrong number of scores");
  }
  std::vector<double> out;
  for (const auto& s : scores) {
    double v = s.get<double>();
    if (!std::isfinite(v)) throw Error(ErrorCode::backend_unavailable, "cross-encoder returned a non-finite score");
    out.push_back(v);
  }
  return out;
}

std::shared_ptr<CrossEncoder> make_cross_encoder(const std::string& spec) {
  if (spec == "mock" || spec == "jaccard" || spec == "mock-jaccard") return std::make_shared<JaccardCrossEncoder>();
  if (spec == "identity") return std::make_shared<IdentityCrossEncoder>();
  if (spec.rfind("http:", 0) == 0) return std::make_shared<HttpCrossEncoder>(spec.substr(5));
  throw ValidationError("unknown cross-encoder backend '" + spec + "'");
}

}  // namespace harness::retrieval
