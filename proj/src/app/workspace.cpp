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

#include "harness/app/workspace.hpp"

#include <cstdlib>
#include <fstream>

#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::app {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    v = v.substr(1, v.size() - 2);
  }
  return v;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw ValidationError("config " + key + ": '" + v + "' is not a number");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw ValidationError("config " + key + ": '" + v + "' is not an integer");
  return n;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n <= 0) throw ValidationError("config " + key + " must be positive");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = corpus::ascii_lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ValidationError("config " + key + ": '" + v + "' is not a boolean");
}

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = {
      "data_dir", "embedder", "llm", "cross_encoder", "host", "port", "bearer_token", "chunk_max_tokens",
      "chunk_overlap", "tau", "theta", "per_subquery_k", "final_k", "expansions", "critical_threshold",
      "policy_threshold", "coverage_covered", "coverage_weak", "narrative", "retry_max_attempts", "retry_base_ms"};
  return k;
}

}  // namespace

std::vector<std::string> config_keys() { return keys(); }

void AppConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  auto& p = pipeline;
  if (key == "data_dir") data_dir = v;
  else if (key == "embedder") embedder = v;
  else if (key == "llm") llm = v;
  else if (key == "cross_encoder") cross_encoder = v;
  else if (key == "host") host = v;
  else if (key == "port") {
    const auto n = to_int(key, v);
    if (n < 0 || n > 65535) throw ValidationError("config port out of range");
    port = static_cast<int>(n);
  } else if (key == "bearer_token") bearer_token = v;
  else if (key == "chunk_max_tokens") chunk_max_tokens = to_size(key, v);
  else if (key == "chunk_overlap") chunk_overlap = static_cast<std::size_t>(to_int(key, v));
  else if (key == "tau") p.retrieval.tau = to_double(key, v);
  else if (key == "theta") p.retrieval.theta = to_double(key, v);
  else if (key == "per_subquery_k") p.retrieval.per_subquery_K = to_size(key, v);
  else if (key == "final_k") p.retrieval.final_k = to_size(key, v);
  else if (key == "expansions") p.retrieval.expansions_per_subquery = static_cast<std::size_t>(to_int(key, v));
  else if (key == "critical_threshold") p.critical_threshold = static_cast<int>(to_int(key, v));
  else if (key == "policy_threshold") p.policy_threshold = to_double(key, v);
  else if (key == "coverage_covered") p.coverage.covered = to_double(key, v);
  else if (key == "coverage_weak") p.coverage.weak = to_double(key, v);
  else if (key == "narrative") p.narrative = to_bool(key, v);
  else if (key == "retry_max_attempts") p.retry.max_attempts = static_cast<int>(to_int(key, v));
  else if (key == "retry_base_ms") p.retry.base_backoff = std::chrono::milliseconds(to_int(key, v));
  else throw ValidationError("unknown config key '" + key + "'");
}

AppConfig::EnvLookup AppConfig::process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

AppConfig AppConfig::load(const std::optional<fs::path>& file, const EnvLookup& env) {
  AppConfig cfg;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ValidationError("cannot read config file " + file->string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == '[') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("config line " + std::to_string(n) + ": expected key = value");
      }
      cfg.set(trim(t.substr(0, eq)), t.substr(eq + 1));
    }
  }
  if (env) {
    for (const auto& key : keys()) {
      std::string name = "HARNESS_";
      for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (auto v = env(name)) cfg.set(key, *v);
    }
  }
  cfg.pipeline.retrieval.validate();
  corpus::ChunkingPolicy{cfg.chunk_max_tokens, cfg.chunk_overlap}.validate();
  if (cfg.pipeline.coverage.weak > cfg.pipeline.coverage.covered) {
    throw ValidationError("coverage_weak must not exceed coverage_covered");
  }
  return cfg;
}

Workspace::Workspace(AppConfig config) : config_(std::move(config)) {
  fs::create_directories(config_.data_dir);
  incidents_ = corpus::CorpusStore::open(config_.data_dir / "corpus", corpus::CorpusKind::incidents);
  policies_ = corpus::CorpusStore::open(config_.data_dir / "policies", corpus::CorpusKind::policies);
  try {
    embedder_ = index::make_embedder(config_.embedder);
  } catch (const TransportError& e) {
    embedder_error_ = e.what();
  }
  llm_ = llm::make_generator(config_.llm);
  cross_ = retrieval::make_cross_encoder(config_.cross_encoder);
  jobs_ = std::make_unique<orchestrator::JobStore>(config_.data_dir);
  hazard_db_ = std::make_unique<orchestrator::HazardControlDb>(config_.data_dir / "hazard_controls.jsonl");
  orchestrator_ = std::make_unique<orchestrator::Orchestrator>(*jobs_, config_.pipeline);
  refresh();
}

fs::path Workspace::index_prefix(corpus::CorpusKind kind) const {
  return config_.data_dir / "index" / (kind == corpus::CorpusKind::incidents ? "incidents" : "policies");
}

void Workspace::load_indexes() {
  incident_index_.reset();
  policy_index_.reset();
  const auto inc = index_prefix(corpus::CorpusKind::incidents);
  if (fs::exists(inc.string() + ".meta.json")) {
    auto idx = index::VectorIndex::load(inc);
    if (idx.size() == incidents_.chunks().size()) incident_index_ = std::make_unique<index::VectorIndex>(std::move(idx));
  }
  const auto pol = index_prefix(corpus::CorpusKind::policies);
  if (policies_.empty()) {
    index::EmbeddingBackendDescriptor d;
    d.backend_id = embedder_ ? embedder_->descriptor().backend_id : config_.embedder;
    policy_index_ = std::make_unique<agents::PolicyIndex>(policies_, index::VectorIndex(d));
  } else if (fs::exists(pol.string() + ".meta.json")) {
    auto idx = index::VectorIndex::load(pol);
    if (idx.size() == policies_.chunks().size()) policy_index_ = std::make_unique<agents::PolicyIndex>(policies_, std::move(idx));
  }
}

void Workspace::refresh() {
  terms_ = retrieval::TermStatistics(incidents_.documents());
  load_indexes();
}

const index::Embedder& Workspace::embedder() const {
  if (!embedder_) throw Error(ErrorCode::backend_unavailable, "embedding backend unavailable: " + embedder_error_);
  return *embedder_;
}

std::shared_ptr<const index::Embedder> Workspace::embedder_ptr() const {
  embedder();
  return embedder_;
}

void Workspace::build_indexes() {
  const auto& embedder = this->embedder();
  fs::create_directories(config_.data_dir / "index");
  auto inc = index::build_index(incidents_, embedder);
  inc.save(index_prefix(corpus::CorpusKind::incidents));
  auto pol = index::build_index(policies_, embedder);
  pol.save(index_prefix(corpus::CorpusKind::policies));
  refresh();
}

const index::VectorIndex& Workspace::incident_index() const {
  if (!incident_index_) {
    throw Error(ErrorCode::backend_unavailable, "incident index is missing or stale; run 'harness index build'");
  }
  return *incident_index_;
}

orchestrator::PipelineDeps Workspace::deps() {
  const auto& idx = incident_index();
  const auto& embedder = this->embedder();
  if (idx.backend().backend_id != embedder.descriptor().backend_id) {
    throw Error(ErrorCode::backend_unavailable, "incident index was built with '" + idx.backend().backend_id +
                                                    "' but the configured embedder is '" +
                                                    embedder.descriptor().backend_id + "'");
  }
  if (!policy_index_) {
    throw Error(ErrorCode::backend_unavailable, "policy index is missing or stale; run 'harness index build'");
  }
  return {embedder, idx, incidents_, *llm_, *cross_, terms_, *policy_index_, hazard_db_.get()};
}

}  // namespace harness::app
