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

#include <fstream>

#include "harness/app/workspace.hpp"
#include "harness/common/error.hpp"
#include "test_support.hpp"

namespace harness::app {
namespace {

using harness::testing::TempDir;

AppConfig::EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST(AppConfig, DefaultsFileThenEnvironment) {
  TempDir tmp;
  const auto file = tmp.path() / "h.conf";
  std::ofstream(file) << "# comment\n[pipeline]\nfinal_k = 7\ntau = 0.85\nembedder = mock-32\n";
  const auto cfg = AppConfig::load(file, env_of({{"HARNESS_FINAL_K", "3"}, {"HARNESS_NARRATIVE", "false"}}));
  EXPECT_EQ(cfg.pipeline.retrieval.final_k, 3u);
  EXPECT_DOUBLE_EQ(cfg.pipeline.retrieval.tau, 0.85);
  EXPECT_EQ(cfg.embedder, "mock-32");
  EXPECT_FALSE(cfg.pipeline.narrative);
  EXPECT_DOUBLE_EQ(cfg.pipeline.retrieval.theta, 0.5);
  EXPECT_EQ(cfg.pipeline.critical_threshold, 12);
}

TEST(AppConfig, FixtureConfigLoads) {
  const auto cfg = AppConfig::load(testing::fixtures_dir() / "harness.conf", env_of({}));
  EXPECT_EQ(cfg.chunk_max_tokens, 64u);
  EXPECT_EQ(cfg.pipeline.retrieval.final_k, 5u);
}

TEST(AppConfig, RejectsBadInput) {
  TempDir tmp;
  const auto file = tmp.path() / "h.conf";
  std::ofstream(file) << "no equals sign\n";
  EXPECT_THROW(AppConfig::load(file, env_of({})), ValidationError);
  EXPECT_THROW(AppConfig::load(tmp.path() / "missing.conf", env_of({})), ValidationError);
  EXPECT_THROW(AppConfig::load(std::nullopt, env_of({{"HARNESS_TAU", "abc"}})), ValidationError);
  EXPECT_THROW(AppConfig::load(std::nullopt, env_of({{"HARNESS_TAU", "2"}})), ValidationError);
  EXPECT_THROW(AppConfig::load(std::nullopt, env_of({{"HARNESS_PORT", "70000"}})), ValidationError);
  EXPECT_THROW(AppConfig::load(std::nullopt, env_of({{"HARNESS_CHUNK_OVERLAP", "2000"}})), ValidationError);
  EXPECT_THROW(AppConfig::load(std::nullopt, env_of({{"HARNESS_COVERAGE_WEAK", "0.9"}})), ValidationError);
  AppConfig c;
  EXPECT_THROW(c.set("colour", "blue"), ValidationError);
  EXPECT_THROW(c.set("narrative", "maybe"), ValidationError);
  EXPECT_FALSE(config_keys().empty());
}

TEST(Workspace, IngestIndexAndRun) {
  TempDir tmp;
  AppConfig cfg = AppConfig::load(testing::fixtures_dir() / "harness.conf", env_of({}));
  cfg.data_dir = tmp.path() / "data";
  cfg.llm = "fixture:" + (testing::fixtures_dir() / "transcript.json").string();
  {
    Workspace ws(cfg);
    EXPECT_FALSE(ws.has_index());
    EXPECT_THROW(ws.deps(), Error);
    std::ifstream inc(testing::fixtures_dir() / "incidents.jsonl");
    ws.incidents().ingest_stream(inc, corpus::ChunkingPolicy{cfg.chunk_max_tokens, cfg.chunk_overlap});
    std::ifstream pol(testing::fixtures_dir() / "policies.jsonl");
    ws.policies().ingest_stream(pol, corpus::ChunkingPolicy{cfg.chunk_max_tokens, cfg.chunk_overlap});
    ws.refresh();
    ws.build_indexes();
    EXPECT_TRUE(ws.has_index());
  }
  Workspace ws(cfg);  // reopened from disk
  ASSERT_TRUE(ws.has_index());
  EXPECT_EQ(ws.incident_index().size(), ws.incidents().chunks().size());
  auto& orch = ws.orchestrator();
  const auto job = orch.run_job(orch.create_job(testing::fixture_workplan()), ws.deps());
  EXPECT_EQ(job.stage, orchestrator::Stage::reported) << job.error;
}

TEST(Workspace, IndexFromAnotherBackendIsUnavailable) {
  TempDir tmp;
  AppConfig cfg;
  cfg.data_dir = tmp.path();
  cfg.embedder = "mock-64";
  {
    Workspace ws(cfg);
    std::ifstream inc(testing::fixtures_dir() / "incidents.jsonl");
    ws.incidents().ingest_stream(inc);
    ws.refresh();
    ws.build_indexes();
  }
  cfg.embedder = "mock-32";
  Workspace ws(cfg);
  try {
    ws.deps();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::backend_unavailable);
  }
}

}  // namespace
}  // namespace harness::app
