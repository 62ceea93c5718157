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

#include "harness/llm/prompts.hpp"

#include <functional>
#include <mutex>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"

namespace harness::llm {

// Defined in the generated prompts_embedded.cpp.
extern const std::map<std::string, std::string>& embedded_prompt_sources();

namespace {

const std::map<std::string, PromptTemplate, std::less<>>& library() {
  static const auto* lib = [] {
    auto* m = new std::map<std::string, PromptTemplate, std::less<>>();
    for (const auto& [id, text] : embedded_prompt_sources()) m->emplace(id, PromptTemplate{id, text, sha256_hex(text)});
    return m;
  }();
  return *lib;
}

}  // namespace

const PromptTemplate& prompt_template(std::string_view id) {
  const auto& lib = library();
  auto it = lib.find(id);
  if (it == lib.end()) throw ValidationError("unknown prompt template '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> prompt_template_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : library()) ids.push_back(id);
  return ids;
}

PromptRequest render_prompt(std::string_view id, const std::map<std::string, std::string>& vars) {
  const auto& tpl = prompt_template(id);
  std::string out;
  const std::string& src = tpl.text;
  std::size_t pos = 0;
  while (pos < src.size()) {
    auto open = src.find("{{", pos);
    if (open == std::string::npos) {
      out.append(src, pos, std::string::npos);
      break;
    }
    auto close = src.find("}}", open + 2);
    if (close == std::string::npos) throw ValidationError("unterminated placeholder in template " + tpl.id);
    out.append(src, pos, open - pos);
    const std::string name = src.substr(open + 2, close - open - 2);
    auto v = vars.find(name);
    if (v == vars.end()) throw ValidationError("template " + tpl.id + " needs a value for '" + name + "'");
    out += v->second;
    pos = close + 2;
  }
  return {tpl.id, tpl.digest, out};
}

void CallLog::record(const PromptRequest& request) {
  ++calls;
  const std::string tag = request.template_id + "@" + request.template_digest.substr(0, 12);
  for (const auto& d : template_digests) {
    if (d == tag) return;
  }
  template_digests.push_back(tag);
}

namespace {

json parse_and_check(const std::string& reply, const std::function<void(const json&)>& check) {
  json parsed;
  try {
    parsed = json::parse(reply);
  } catch (const json::exception&) {
    throw ValidationError("reply is not a JSON document");
  }
  try {
    check(parsed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("reply has the wrong shape: ") + e.what());
  }
  return parsed;
}

}  // namespace

json call_json(const Generator& llm, const PromptRequest& request, const std::string& agent,
               const std::function<void(const json&)>& check, CallLog* log) {
  if (log) log->record(request);
  const std::string reply = llm.generate(request);
  try {
    return parse_and_check(reply, check);
  } catch (const ValidationError& first) {
    auto repair = render_prompt("repair", {{"template_id", request.template_id},
                                           {"error", first.what()},
                                           {"response", reply}});
    if (log) {
      log->record(repair);
      ++log->repairs;
      log->note(agent + ": repair requested (" + std::string(first.what()) + ")");
    }
    const std::string second = llm.generate(repair);
    try {
      return parse_and_check(second, check);
    } catch (const ValidationError& again) {
      throw AgentError(agent, agent + ": unusable reply after repair: " + again.what());
    }
  }
}

}  // namespace harness::llm
