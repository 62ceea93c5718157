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

#include "harness/llm/generator.hpp"

#include <fstream>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"
#include "harness/common/http_client.hpp"

namespace harness::llm {
namespace {

std::vector<json> responses_of(const json& entry) {
  if (entry.is_object() && entry.contains("responses")) return entry.at("responses").get<std::vector<json>>();
  if (entry.is_object() && entry.contains("response")) return {entry.at("response")};
  return {entry};
}

std::string realize(const json& response) {
  if (response.is_string()) return response.get<std::string>();
  if (response.is_object() && response.size() == 1 && response.contains("error")) {
    const auto kind = response.at("error").get<std::string>();
    if (kind == "transport") throw TransportError("fixture: scripted transport failure");
    throw Error(ErrorCode::backend_unavailable, "fixture: scripted backend failure (" + kind + ")");
  }
  // Structured responses are a transcript convenience; the backend still
  // returns text.
  return response.dump();
}

}  // namespace

FixtureGenerator::FixtureGenerator(json transcript, std::string backend_id) : backend_id_(std::move(backend_id)) {
  if (transcript.contains("backend_id")) backend_id_ = transcript.at("backend_id").get<std::string>();
  if (auto it = transcript.find("exact"); it != transcript.end()) {
    for (auto e = it->begin(); e != it->end(); ++e) exact_[e.key()] = responses_of(e.value());
  }
  if (auto it = transcript.find("rules"); it != transcript.end()) {
    for (const auto& r : *it) {
      Entry entry;
      entry.template_id = r.value("template", std::string("*"));
      if (auto c = r.find("contains"); c != r.end()) {
        if (c->is_string()) {
          entry.contains.push_back(c->get<std::string>());
        } else {
          entry.contains = c->get<std::vector<std::string>>();
        }
      }
      entry.responses = responses_of(r);
      if (entry.responses.empty()) throw ValidationError("fixture rule without responses");
      rules_.push_back(std::move(entry));
    }
  }
  rule_cursor_.assign(rules_.size(), 0);
}

std::shared_ptr<FixtureGenerator> FixtureGenerator::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read fixture transcript " + path.string());
  return std::make_shared<FixtureGenerator>(json::parse(in), "fixture:" + path.filename().string());
}

std::string FixtureGenerator::generate(const PromptRequest& request) const {
  json chosen;
  {
    std::lock_guard lock(mu_);
    calls_.push_back(request);
    const std::string digest = sha256_hex(request.text);
    if (auto it = exact_.find(digest); it != exact_.end()) {
      auto& cursor = exact_cursor_[digest];
      chosen = it->second[std::min(cursor, it->second.size() - 1)];
      ++cursor;
    } else {
      bool found = false;
      for (std::size_t i = 0; i < rules_.size() && !found; ++i) {
        const auto& rule = rules_[i];
        if (rule.template_id != "*" && rule.template_id != request.template_id) continue;
        bool all = true;
        for (const auto& needle : rule.contains) {
          if (request.text.find(needle) == std::string::npos) {
            all = false;
            break;
          }
        }
        if (!all) continue;
        auto& cursor = rule_cursor_[i];
        chosen = rule.responses[std::min(cursor, rule.responses.size() - 1)];
        ++cursor;
        found = true;
      }
      if (!found) {
        throw Error(ErrorCode::backend_unavailable,
                    "fixture has no scripted response for template '" + request.template_id + "'");
      }
    }
  }
  return realize(chosen);
}

std::vector<PromptRequest> FixtureGenerator::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::string HttpGenerator::generate(const PromptRequest& request) const {
  json response = post_json(url_, {{"template_id", request.template_id}, {"prompt", request.text}},
                            std::chrono::seconds(120));
  if (!response.contains("text") || !response.at("text").is_string()) {
    throw Error(ErrorCode::backend_unavailable, "generation backend response lacks 'text'");
  }
  return response.at("text").get<std::string>();
}

std::string UnavailableGenerator::generate(const PromptRequest&) const {
  throw TransportError("no generation backend configured");
}

std::shared_ptr<Generator> make_generator(const std::string& spec) {
  if (spec.rfind("fixture:", 0) == 0) return FixtureGenerator::from_file(spec.substr(8));
  if (spec.rfind("http:", 0) == 0) return std::make_shared<HttpGenerator>(spec.substr(5));
  if (spec == "none" || spec.empty()) return std::make_shared<UnavailableGenerator>();
  throw ValidationError("unknown generation backend '" + spec + "'");
}

}  // namespace harness::llm
