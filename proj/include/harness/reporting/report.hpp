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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "harness/common/canonical_json.hpp"
#include "harness/corpus/corpus_store.hpp"
#include "harness/llm/generator.hpp"
#include "harness/llm/prompts.hpp"
#include "harness/orchestrator/job.hpp"
#include "harness/retrieval/smart_retrieval.hpp"

namespace harness::reporting {

// Section keys in rendering order.
inline constexpr std::string_view kSectionKeys[] = {
    "workplan_summary",  "retrieved_events", "hazard_control_analysis",
    "critical_failures", "policy_mappings",  "overall_risk_profile"};

struct NarrativeParagraph {
  std::string text;
  std::vector<std::string> citations;  // context doc ids cited as [doc_id]
  bool flagged = false;                // no citation

  bool operator==(const NarrativeParagraph&) const = default;
};

struct Narrative {
  std::vector<NarrativeParagraph> paragraphs;
  bool available = true;  // false when the backend failed
  std::string note;

  bool operator==(const Narrative&) const = default;
};

json to_json(const Narrative& n);
Narrative narrative_from_json(const json& j);

// Prompts with the report skeleton and the context chunk texts. Paragraphs
// are separated by blank lines; one without a [doc_id] citation of a context
// document is flagged. Throws ValidationError on an empty context; backend
// failures propagate as Error.
Narrative generate_narrative(const json& report, const retrieval::ContextSet& context,
                             const corpus::CorpusStore& corpus, const llm::Generator& llm, llm::CallLog* log = nullptr);

// Consolidates the stage outputs (through policies_done) into the report.
// Pure: the same job, version and narrative give the same bytes. Throws
// ValidationError when a stage output is missing.
json assemble(const orchestrator::JobState& job, int version, const corpus::CorpusStore& corpus,
              const std::optional<Narrative>& narrative = std::nullopt);

// The risk profile recounted from the other sections.
json recount_risk_profile(const json& sections);

// Schema, recount and provenance checks. Returns the problems found.
std::vector<std::string> validate_report(const json& report, const corpus::CorpusStore& corpus,
                                         const corpus::CorpusStore* policies);

enum class Format { json, markdown, html };

Format parse_format(std::string_view text);  // "json" | "md" | "markdown" | "html"
std::string_view extension(Format f);        // "json" | "md" | "html"

// json is the canonical form (pretty, sorted keys, six-decimal floats);
// markdown and html show every canonical field.
std::string render(const json& report, Format format);

// <dir>/<job_id>.v<k>.report.<ext>
std::filesystem::path report_path(const std::filesystem::path& dir, const std::string& job_id, int version,
                                  Format format);

// Writes all three renderings. An existing file with different content is a
// ConflictError: versions are never overwritten.
std::vector<std::filesystem::path> write_report_files(const json& report, const std::filesystem::path& dir);

}  // namespace harness::reporting
