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

#include <gtest/gtest.h>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"

namespace harness::llm {
namespace {

PromptRequest req(std::string id, std::string text) { return {std::move(id), "", std::move(text)}; }

TEST(Prompts, AllTemplatesLoadedWithDigests) {
  const auto ids = prompt_template_ids();
  for (const char* id : {"summarize", "keywords", "interpret_decompose", "expand_paraphrase", "extract_pairs",
                         "fmea_identify", "fmea_causes", "fmea_effects", "narrative", "judge_criterion", "repair",
                         "answer", "answer_agreement"}) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
    const auto& t = prompt_template(id);
    EXPECT_EQ(t.digest, sha256_hex(t.text));
  }
  EXPECT_THROW(prompt_template("nope"), Error);
}

TEST(Prompts, RenderSubstitutesAndRequiresEveryPlaceholder) {
  const auto r = render_prompt("repair", {{"template_id", "x"}, {"error", "bad"}, {"response", "{}"}});
  EXPECT_EQ(r.template_id, "repair");
  EXPECT_EQ(r.template_digest, prompt_template("repair").digest);
  EXPECT_EQ(r.text.find("{{"), std::string::npos);
  EXPECT_NE(r.text.find("bad"), std::string::npos);
  EXPECT_THROW(render_prompt("repair", {{"template_id", "x"}}), ValidationError);
}

TEST(FixtureGenerator, ExactMatchBeatsRules) {
  json t = {{"exact", {{sha256_hex("hello"), "exact reply"}}}, {"rules", {{{"response", "rule reply"}}}}};
  FixtureGenerator g(t);
  EXPECT_EQ(g.generate(req("a", "hello")), "exact reply");
  EXPECT_EQ(g.generate(req("a", "other")), "rule reply");
  EXPECT_EQ(g.calls().size(), 2u);
}

TEST(FixtureGenerator, RulesMatchTemplateAndAllSubstrings) {
  json t = {{"rules",
             {{{"template", "t1"}, {"contains", {"x", "y"}}, {"response", "both"}},
              {{"template", "t1"}, {"contains", "x"}, {"response", {{"k", 1}}}},
              {{"template", "t2"}, {"response", "two"}}}}};
  FixtureGenerator g(t);
  EXPECT_EQ(g.generate(req("t1", "x y")), "both");
  EXPECT_EQ(json::parse(g.generate(req("t1", "x alone"))), (json{{"k", 1}}));
  EXPECT_EQ(g.generate(req("t2", "anything")), "two");
  EXPECT_THROW(g.generate(req("t1", "neither")), Error);
}

TEST(FixtureGenerator, SequencesRepeatTheirLastResponse) {
  json t = {{"rules", {{{"responses", {"one", "two"}}}}}};
  FixtureGenerator g(t);
  EXPECT_EQ(g.generate(req("a", "")), "one");
  EXPECT_EQ(g.generate(req("a", "")), "two");
  EXPECT_EQ(g.generate(req("a", "")), "two");
}

TEST(FixtureGenerator, ScriptedErrors) {
  json t = {{"rules",
             {{{"template", "t"}, {"response", {{"error", "transport"}}}},
              {{"template", "u"}, {"response", {{"error", "unavailable"}}}}}}};
  FixtureGenerator g(t);
  EXPECT_THROW(g.generate(req("t", "")), TransportError);
  try {
    g.generate(req("u", ""));
    FAIL();
  } catch (const TransportError&) {
    FAIL() << "unavailable must not be retryable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::backend_unavailable);
  }
}

TEST(FixtureGenerator, BackendIdFromTranscript) {
  EXPECT_EQ(FixtureGenerator(json{{"backend_id", "v9"}}).backend_id(), "v9");
  EXPECT_EQ(make_generator("none")->backend_id(), "unavailable");
  EXPECT_THROW(make_generator("ftp:x"), ValidationError);
  EXPECT_THROW(make_generator("none")->generate(req("a", "")), TransportError);
}

void need_answer(const json& j) {
  if (!j.contains("answer")) throw ValidationError("missing 'answer'");
}

TEST(CallJson, ValidFirstReplyNeedsNoRepair) {
  FixtureGenerator g(json{{"rules", {{{"response", {{"answer", 1}}}}}}});
  CallLog log;
  const auto j = call_json(g, render_prompt("answer", {{"question", "q"}, {"context", "c"}}), "a", need_answer, &log);
  EXPECT_EQ(j.at("answer"), 1);
  EXPECT_EQ(log.repairs, 0);
  EXPECT_EQ(log.calls, 1);
}

TEST(CallJson, OneRepairThenSuccess) {
  FixtureGenerator g(json{{"rules",
                           {{{"template", "answer"}, {"response", "not json"}},
                            {{"template", "repair"}, {"response", {{"answer", 2}}}}}}});
  CallLog log;
  const auto j = call_json(g, render_prompt("answer", {{"question", "q"}, {"context", "c"}}), "a", need_answer, &log);
  EXPECT_EQ(j.at("answer"), 2);
  EXPECT_EQ(log.repairs, 1);
  const auto calls = g.calls();
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_NE(calls[1].text.find("not json"), std::string::npos);
}

TEST(CallJson, SecondFailureIsAgentError) {
  FixtureGenerator g(json{{"rules", {{{"response", {{"other", 1}}}}}}});
  try {
    call_json(g, render_prompt("answer", {{"question", "q"}, {"context", "c"}}), "answerer", need_answer, nullptr);
    FAIL();
  } catch (const AgentError& e) {
    EXPECT_EQ(e.agent(), "answerer");
  }
  EXPECT_EQ(g.calls().size(), 2u);
}

TEST(CallJson, TransportErrorsPropagate) {
  FixtureGenerator g(json{{"rules", {{{"response", {{"error", "transport"}}}}}}});
  EXPECT_THROW(call_json(g, render_prompt("answer", {{"question", "q"}, {"context", "c"}}), "a", need_answer, nullptr),
               TransportError);
  EXPECT_EQ(g.calls().size(), 1u);
}

}  // namespace
}  // namespace harness::llm
