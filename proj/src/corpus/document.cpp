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

#include "harness/corpus/document.hpp"

#include <chrono>
#include <cstdio>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::corpus {
namespace {

std::string string_field(const json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw ValidationError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

bool valid_iso_date(const std::string& text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (text[static_cast<std::size_t>(i)] < '0' || text[static_cast<std::size_t>(i)] > '9') return false;
  }
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return false;
  int y = std::stoi(text.substr(0, 4));
  unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
  unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

Document document_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  Document doc;
  doc.doc_id = string_field(j, "doc_id", true);
  if (doc.doc_id.empty()) throw ValidationError("empty doc_id");
  doc.event_name = string_field(j, "event_name", false);
  if (auto it = j.find("event_date"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("field 'event_date' must be a string");
    doc.event_date = it->get<std::string>();
    if (!valid_iso_date(*doc.event_date)) throw ValidationError("invalid event_date '" + *doc.event_date + "'");
  }
  doc.location = string_field(j, "location", false);
  doc.summary = string_field(j, "summary", false);
  doc.body = string_field(j, "body", false);
  doc.source_tag = string_field(j, "source_tag", false);
  if (auto it = j.find("origin"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("field 'origin' must be a string");
    doc.origin = it->get<std::string>();
  }
  if (normalize(doc.summary).empty() && normalize(doc.body).empty()) {
    throw ValidationError("document '" + doc.doc_id + "' has empty summary and body");
  }
  return doc;
}

json to_json(const Document& doc) {
  json j = {{"doc_id", doc.doc_id},     {"event_name", doc.event_name}, {"location", doc.location},
            {"summary", doc.summary},   {"body", doc.body},             {"source_tag", doc.source_tag}};
  if (doc.event_date) j["event_date"] = *doc.event_date;
  if (doc.origin) j["origin"] = *doc.origin;
  return j;
}

Document normalized(Document doc) {
  doc.event_name = normalize(doc.event_name);
  if (doc.event_date) doc.event_date = normalize(*doc.event_date);
  doc.location = normalize(doc.location);
  doc.summary = normalize(doc.summary);
  doc.body = normalize(doc.body);
  doc.source_tag = normalize(doc.source_tag);
  return doc;
}

json to_json(const Chunk& c) {
  return {{"chunk_id", c.chunk_id}, {"doc_id", c.doc_id},       {"seq", c.seq},
          {"text", c.text},         {"token_count", c.token_count}, {"char_begin", c.char_begin},
          {"char_end", c.char_end}};
}

Chunk chunk_from_json(const json& j) {
  Chunk c;
  c.chunk_id = j.at("chunk_id").get<std::string>();
  c.doc_id = j.at("doc_id").get<std::string>();
  c.seq = j.at("seq").get<std::size_t>();
  c.text = j.at("text").get<std::string>();
  c.token_count = j.at("token_count").get<std::size_t>();
  c.char_begin = j.at("char_begin").get<std::size_t>();
  c.char_end = j.at("char_end").get<std::size_t>();
  return c;
}

std::string make_chunk_id(const std::string& doc_id, std::size_t seq) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%04zu", seq);
  return doc_id + buf;
}

}  // namespace harness::corpus
