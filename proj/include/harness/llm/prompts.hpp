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

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/llm/generator.hpp"

namespace harness::llm {

// Versioned prompt templates, compiled in from prompts/*.txt. Placeholders
// are written {{name}}.
struct PromptTemplate {
  std::string id;
  std::string text;
  std::string digest;  // SHA-256 of text
};

const PromptTemplate& prompt_template(std::string_view id);
std::vector<std::string> prompt_template_ids();

// Substitutes every placeholder. Throws ValidationError for a placeholder
// with no value.
PromptRequest render_prompt(std::string_view id, const std::map<std::string, std::string>& vars);

// Collects what an agent did with its backend, for the job trace.
struct CallLog {
  std::vector<std::string> notes;
  std::vector<std::string> template_digests;
  int repairs = 0;
  int calls = 0;

  void note(std::string text) { notes.push_back(std::move(text)); }
  void record(const PromptRequest& request);
};

// Strict JSON call: the whole reply must parse as JSON and pass `check`,
// which throws ValidationError (or a json exception) describing the problem.
// On failure the backend gets one repair prompt; a second failure raises
// AgentError(agent). Transport errors propagate unchanged.
json call_json(const Generator& llm, const PromptRequest& request, const std::string& agent,
               const std::function<void(const json&)>& check, CallLog* log);

}  // namespace harness::llm
