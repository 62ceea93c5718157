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
#include <string>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/corpus/document.hpp"

namespace harness::corpus {

struct ChunkingPolicy {
  std::size_t max_tokens = 1024;
  std::size_t overlap_tokens = 128;
  std::string tokenizer_id = "ws-punct-v1";

  void validate() const;
  std::size_t stride() const { return max_tokens - overlap_tokens; }
  bool operator==(const ChunkingPolicy&) const = default;
};

json to_json(const ChunkingPolicy& p);
ChunkingPolicy chunking_policy_from_json(const json& j);

// Sliding windows of max_tokens tokens advancing by stride(); the final
// partial window is kept. A chunk's text runs from its first token up to the
// first token of the next window position, so the chunks reassemble the
// normalized text exactly (see reassemble()).
std::vector<Chunk> chunk(const Document& doc, const ChunkingPolicy& policy);

// Inverse of chunk() for one document's ordered chunks.
std::string reassemble(const std::vector<Chunk>& chunks);

}  // namespace harness::corpus
