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
#include <optional>
#include <string>
#include <vector>

#include "harness/common/canonical_json.hpp"

namespace harness::corpus {

struct Document {
  std::string doc_id;
  std::string event_name;
  std::optional<std::string> event_date;  // ISO-8601 date, absent allowed
  std::string location;
  std::string summary;
  std::string body;
  std::string source_tag;
  // Only set for policy corpora ("sbms" or "external").
  std::optional<std::string> origin;

  // Text that gets chunked and embedded: the body, or the summary when the
  // body is empty.
  const std::string& primary_text() const { return body.empty() ? summary : body; }

  bool operator==(const Document&) const = default;
};

// Throws ValidationError on a missing doc_id, empty summary+body, a bad date
// or wrong field types.
Document document_from_json(const json& j);
json to_json(const Document& doc);

// Field-by-field normalize().
Document normalized(Document doc);

// True for YYYY-MM-DD (optionally followed by a time part) naming a real
// calendar date.
bool valid_iso_date(const std::string& text);

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::size_t seq = 0;
  std::string text;
  std::size_t token_count = 0;
  // Byte range of `text` within the normalized primary text.
  std::size_t char_begin = 0;
  std::size_t char_end = 0;

  bool operator==(const Chunk&) const = default;
};

json to_json(const Chunk& chunk);
Chunk chunk_from_json(const json& j);

std::string make_chunk_id(const std::string& doc_id, std::size_t seq);

}  // namespace harness::corpus
