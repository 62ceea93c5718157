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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "harness/agents/agents.hpp"
#include "harness/corpus/corpus_store.hpp"
#include "harness/index/embedding.hpp"
#include "harness/index/vector_index.hpp"
#include "harness/llm/generator.hpp"
#include "harness/orchestrator/job_store.hpp"
#include "harness/orchestrator/orchestrator.hpp"
#include "harness/retrieval/cross_encoder.hpp"
#include "harness/retrieval/keywords.hpp"

namespace harness::app {

// key = value settings, '#' comments. Environment variables named
// HARNESS_<KEY> (upper case) override the file.
struct AppConfig {
  std::filesystem::path data_dir = "harness-data";
  std::string embedder = "mock-64";
  std::string llm = "none";
  std::string cross_encoder = "jaccard";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string bearer_token;  // empty disables the check
  std::size_t chunk_max_tokens = 1024;
  std::size_t chunk_overlap = 128;
  orchestrator::PipelineConfig pipeline;

  // Applies one setting; throws ValidationError for an unknown key or a bad
  // value.
  void set(const std::string& key, const std::string& value);

  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
  static EnvLookup process_env();

  // Defaults, then the file (when given), then the environment.
  static AppConfig load(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_env());
};

std::vector<std::string> config_keys();

// The on-disk state under data_dir: incident and policy corpora, their
// vector indexes, the job store and the hazard-control database, plus the
// backends named by the config.
class Workspace {
 public:
  explicit Workspace(AppConfig config);

  const AppConfig& config() const { return config_; }
  corpus::CorpusStore& incidents() { return incidents_; }
  corpus::CorpusStore& policies() { return policies_; }
  const corpus::CorpusStore& incidents() const { return incidents_; }
  const corpus::CorpusStore& policies() const { return policies_; }
  orchestrator::JobStore& jobs() { return *jobs_; }
  orchestrator::Orchestrator& orchestrator() { return *orchestrator_; }
  orchestrator::HazardControlDb& hazard_db() { return *hazard_db_; }

  // Throws Error(backend_unavailable) when the backend could not be reached
  // at startup.
  const index::Embedder& embedder() const;
  const llm::Generator& llm() const { return *llm_; }
  const retrieval::CrossEncoder& cross_encoder() const { return *cross_; }
  std::shared_ptr<const index::Embedder> embedder_ptr() const;

  // Embeds both corpora with the configured backend and saves the indexes.
  void build_indexes();
  bool has_index() const { return incident_index_ != nullptr; }

  // Dependencies for a pipeline run. Throws Error(backend_unavailable) when
  // the incident index is missing or was built with another backend.
  orchestrator::PipelineDeps deps();

  const index::VectorIndex& incident_index() const;
  const retrieval::TermStatistics& terms() const { return terms_; }

  // Reloads corpora-derived state after an ingest.
  void refresh();

  std::filesystem::path index_prefix(corpus::CorpusKind kind) const;

 private:
  void load_indexes();

  AppConfig config_;
  corpus::CorpusStore incidents_;
  corpus::CorpusStore policies_;
  std::shared_ptr<index::Embedder> embedder_;
  std::string embedder_error_;
  std::shared_ptr<llm::Generator> llm_;
  std::shared_ptr<retrieval::CrossEncoder> cross_;
  std::unique_ptr<index::VectorIndex> incident_index_;
  std::unique_ptr<agents::PolicyIndex> policy_index_;
  retrieval::TermStatistics terms_;
  std::unique_ptr<orchestrator::JobStore> jobs_;
  std::unique_ptr<orchestrator::HazardControlDb> hazard_db_;
  std::unique_ptr<orchestrator::Orchestrator> orchestrator_;
};

}  // namespace harness::app
