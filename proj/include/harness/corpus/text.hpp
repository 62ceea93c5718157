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
#include <string_view>
#include <vector>

namespace harness::corpus {

// NFC-normalizes, strips control characters, collapses whitespace runs to a
// single space and trims. Invalid UTF-8 sequences become U+FFFD. Idempotent.
std::string normalize(std::string_view raw);

// A token is a maximal run of word characters (ASCII alphanumerics and any
// non-ASCII code point) or a single ASCII punctuation character. Whitespace
// only separates.
struct TokenSpan {
  std::size_t begin = 0;  // byte offset
  std::size_t end = 0;    // one past the last byte
  bool word = true;
};

inline constexpr std::string_view kTokenizerId = "ws-punct-v1";

std::vector<TokenSpan> tokenize_spans(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

// Lowercased tokens (ASCII folding only). The representation the mock
// embedder and the Jaccard cross-encoder operate on.
std::vector<std::string> lower_tokens(std::string_view text);

std::string ascii_lower(std::string_view s);

std::size_t word_count(std::string_view text);

}  // namespace harness::corpus
