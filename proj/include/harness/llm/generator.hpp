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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "harness/common/canonical_json.hpp"

namespace harness::llm {

struct PromptRequest {
  std::string template_id;
  std::string template_digest;
  std::string text;
};

// Text generation backend used by retrieval and the agents.
// Implementations must be safe for concurrent calls. Failures to reach the
// backend raise TransportError; any other backend failure raises
// Error(backend_unavailable).
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string backend_id() const = 0;
  virtual std::string generate(const PromptRequest& request) const = 0;
};

// Scripted transcript backend. The transcript maps a prompt's SHA-256 to a
// response ("exact"), with ordered rules as a fallback that match on the
// template id and required substrings. A rule (or exact entry) may hold a
// sequence of responses that are consumed call by call, the last one
// repeating. A response {"error": "transport"} raises TransportError and
// {"error": "unavailable"} raises Error(backend_unavailable).
class FixtureGenerator final : public Generator {
 public:
  explicit FixtureGenerator(json transcript, std::string backend_id = "fixture");
  static std::shared_ptr<FixtureGenerator> from_file(const std::filesystem::path& path);

  std::string backend_id() const override { return backend_id_; }
  std::string generate(const PromptRequest& request) const override;

  // Every request seen so far, in call order.
  std::vector<PromptRequest> calls() const;

 private:
  struct Entry {
    std::string template_id;  // "*" matches any
    std::vector<std::string> contains;
    std::vector<json> responses;
  };

  std::string consume(std::size_t entry_index, const std::vector<json>& responses) const;

  std::string backend_id_;
  std::map<std::string, std::vector<json>> exact_;
  std::vector<Entry> rules_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::size_t> exact_cursor_;
  mutable std::vector<std::size_t> rule_cursor_;
  mutable std::vector<PromptRequest> calls_;
};

// Remote contract: POST {"template_id", "prompt"} -> {"text"}.
class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(std::string url) : url_(std::move(url)) {}
  std::string backend_id() const override { return "http:" + url_; }
  std::string generate(const PromptRequest& request) const override;

 private:
  std::string url_;
};

// Always fails with TransportError. Stands in for an unconfigured backend.
class UnavailableGenerator final : public Generator {
 public:
  std::string backend_id() const override { return "unavailable"; }
  std::string generate(const PromptRequest& request) const override;
};

// "fixture:<path>", "http:<url>" or "none".
std::shared_ptr<Generator> make_generator(const std::string& spec);

}  // namespace harness::llm
