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

#include "harness/corpus/chunker.hpp"

#include <algorithm>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::corpus {

void ChunkingPolicy::validate() const {
  if (max_tokens == 0) throw ValidationError("max_tokens must be positive");
  if (overlap_tokens >= max_tokens) throw ValidationError("overlap_tokens must be < max_tokens");
  if (tokenizer_id != kTokenizerId) throw ValidationError("unknown tokenizer '" + tokenizer_id + "'");
}

json to_json(const ChunkingPolicy& p) {
  return {{"max_tokens", p.max_tokens}, {"overlap_tokens", p.overlap_tokens}, {"tokenizer_id", p.tokenizer_id}};
}

ChunkingPolicy chunking_policy_from_json(const json& j) {
  ChunkingPolicy p;
  p.max_tokens = j.at("max_tokens").get<std::size_t>();
  p.overlap_tokens = j.at("overlap_tokens").get<std::size_t>();
  p.tokenizer_id = j.value("tokenizer_id", std::string(kTokenizerId));
  p.validate();
  return p;
}

std::vector<Chunk> chunk(const Document& doc, const ChunkingPolicy& policy) {
  policy.validate();
  const std::string text = normalize(doc.primary_text());
  if (text.empty()) throw ValidationError("document '" + doc.doc_id + "' has empty summary and body");

  const auto spans = tokenize_spans(text);
  const std::size_t total = spans.size();
  auto offset_of = [&](std::size_t token) { return token < total ? spans[token].begin : text.size(); };

  std::vector<Chunk> chunks;
  for (std::size_t start = 0;; start += policy.stride()) {
    const std::size_t stop = std::min(start + policy.max_tokens, total);
    Chunk c;
    c.doc_id = doc.doc_id;
    c.seq = chunks.size();
    c.chunk_id = make_chunk_id(doc.doc_id, c.seq);
    c.token_count = stop - start;
    c.char_begin = spans[start].begin;
    c.char_end = offset_of(stop);
    c.text = text.substr(c.char_begin, c.char_end - c.char_begin);
    chunks.push_back(std::move(c));
    if (stop == total) break;
  }
  return chunks;
}

std::string reassemble(const std::vector<Chunk>& chunks) {
  std::string out;
  std::size_t covered = 0;
  for (const auto& c : chunks) {
    if (out.empty()) {
      out = c.text;
    } else {
      out += c.text.substr(covered - c.char_begin);
    }
    covered = c.char_end;
  }
  return out;
}

}  // namespace harness::corpus
