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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harness/agents/agents.hpp"
#include "harness/common/canonical_json.hpp"
#include "harness/corpus/corpus_store.hpp"
#include "harness/index/embedding.hpp"
#include "harness/index/vector_index.hpp"
#include "harness/llm/generator.hpp"
#include "harness/orchestrator/job_store.hpp"
#include "harness/orchestrator/orchestrator.hpp"
#include "harness/retrieval/cross_encoder.hpp"
#include "harness/retrieval/keywords.hpp"

#ifndef HARNESS_SOURCE_DIR
#error "HARNESS_SOURCE_DIR must be defined by the build"
#endif

namespace harness::testing {

inline std::filesystem::path source_dir() { return HARNESS_SOURCE_DIR; }
inline std::filesystem::path fixtures_dir() { return source_dir() / "fixtures"; }
inline std::filesystem::path oracle_dir() { return source_dir() / "tests" / "oracles" / "frozen"; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json read_json(const std::filesystem::path& p) { return json::parse(read_text(p)); }

inline std::vector<corpus::Document> read_docs(const std::filesystem::path& jsonl) {
  std::vector<corpus::Document> out;
  std::ifstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(corpus::document_from_json(json::parse(line)));
  }
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("harness-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Timestamp fixed_time() { return parse_timestamp("2026-01-05T09:00:00.000Z"); }

// The fixture corpora, indexes and backends wired for in-process pipeline
// runs. Not copyable: the policy index points into the policy store.
struct FixturePipeline {
  explicit FixturePipeline(json transcript = read_json(fixtures_dir() / "transcript.json"),
                           corpus::ChunkingPolicy policy = {64, 8})
      : embedder(64),
        llm(std::make_shared<llm::FixtureGenerator>(std::move(transcript))),
        incidents(corpus::CorpusStore::in_memory(policy)),
        policies(corpus::CorpusStore::in_memory(policy, corpus::CorpusKind::policies)) {
    incidents.add(read_docs(fixtures_dir() / "incidents.jsonl"));
    policies.add(read_docs(fixtures_dir() / "policies.jsonl"));
    index = index::build_index(incidents, embedder);
    policy_index = std::make_unique<agents::PolicyIndex>(policies, index::build_index(policies, embedder));
    terms = retrieval::TermStatistics(incidents.documents());
  }
  FixturePipeline(const FixturePipeline&) = delete;
  FixturePipeline& operator=(const FixturePipeline&) = delete;

  orchestrator::PipelineDeps deps(orchestrator::HazardControlDb* db = nullptr) const {
    return {embedder, index, incidents, *llm, cross, terms, *policy_index, db};
  }
  retrieval::RetrievalDeps retrieval_deps() const { return {embedder, index, incidents, *llm, cross, terms}; }

  index::MockEmbedder embedder;
  std::shared_ptr<llm::FixtureGenerator> llm;
  corpus::CorpusStore incidents;
  corpus::CorpusStore policies;
  index::VectorIndex index;
  std::unique_ptr<agents::PolicyIndex> policy_index;
  retrieval::JaccardCrossEncoder cross;
  retrieval::TermStatistics terms;
};

inline corpus::Document fixture_workplan() { return corpus::document_from_json(read_json(fixtures_dir() / "workplan.json")); }

inline orchestrator::Orchestrator make_orchestrator(orchestrator::JobStore& store,
                                                    orchestrator::PipelineConfig config = {}) {
  config.retrieval.final_k = 5;
  return orchestrator::Orchestrator(store, config, [](std::chrono::milliseconds) {}, [] { return fixed_time(); });
}

}  // namespace harness::testing
