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

#include "harness/corpus/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace harness::corpus {
namespace {

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

bool is_ascii_space(unsigned char c) { return c == ' ' || (c >= 0x09 && c <= 0x0d); }

}  // namespace

std::string normalize(std::string_view raw) {
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));

  // Strip and collapse before composing: removing a control character can
  // bring a base and a combining mark together, and NFC must see that.
  icu::UnicodeString cleaned;
  bool pending_space = false;
  for (int32_t i = 0; i < input.length();) {
    UChar32 cp = input.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = true;
      continue;
    }
    if (u_charType(cp) == U_CONTROL_CHAR) continue;
    if (pending_space && cleaned.length() > 0) cleaned.append(static_cast<UChar>(' '));
    pending_space = false;
    cleaned.append(cp);
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC unavailable");
  icu::UnicodeString composed = nfc->normalize(cleaned, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");

  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::vector<TokenSpan> tokenize_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      ++i;
    } else if (is_ascii_punct(c)) {
      spans.push_back({i, i + 1, false});
      ++i;
    } else {
      std::size_t start = i;
      while (i < n) {
        auto d = static_cast<unsigned char>(text[i]);
        if (is_ascii_space(d) || is_ascii_punct(d)) break;
        ++i;
      }
      spans.push_back({start, i, true});
    }
  }
  return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : tokenize_spans(text)) out.emplace_back(text.substr(s.begin, s.end - s.begin));
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> lower_tokens(std::string_view text) {
  auto tokens = tokenize(text);
  for (auto& t : tokens) t = ascii_lower(t);
  return tokens;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (is_ascii_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace harness::corpus
