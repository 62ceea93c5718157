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

#include <chrono>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "harness/agents/agents.hpp"
#include "harness/common/time.hpp"
#include "harness/orchestrator/job.hpp"
#include "harness/orchestrator/job_store.hpp"
#include "harness/retrieval/cross_encoder.hpp"
#include "harness/retrieval/keywords.hpp"
#include "harness/retrieval/smart_retrieval.hpp"

namespace harness::orchestrator {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{250};

  // Delay after failed attempt n (1-based): base * 2^(n-1).
  std::chrono::milliseconds backoff(int attempt) const;
};

struct PipelineConfig {
  retrieval::RetrievalConfig retrieval;
  retrieval::InterpretOptions interpret;
  agents::CoverageThresholds coverage;
  int critical_threshold = agents::kDefaultCriticalThreshold;
  double policy_threshold = agents::kDefaultPolicyThreshold;
  bool narrative = true;
  RetryPolicy retry;
};

struct PipelineDeps {
  const index::Embedder& embedder;
  const index::VectorIndex& index;
  const corpus::CorpusStore& corpus;
  const llm::Generator& llm;
  const retrieval::CrossEncoder& cross;
  const retrieval::TermStatistics& terms;
  const agents::PolicyIndex& policies;
  HazardControlDb* hazard_db = nullptr;
};

// Agent name recorded in the trace for the stage that produces `s`.
std::string_view agent_for(Stage s);

using NowFn = std::function<Timestamp()>;

// Runs the fixed stage sequence for jobs held in a JobStore. Different jobs
// may run concurrently; a second concurrent run of the same job is refused.
class Orchestrator {
 public:
  explicit Orchestrator(JobStore& store, PipelineConfig config = {}, Sleeper sleeper = real_sleeper(),
                        NowFn now = [] { return Clock::now(); });

  // Validates the work plan (body or summary non-empty) and persists the job
  // at stage created.
  std::string create_job(const corpus::Document& workplan);

  // Runs every stage from created to reported. Transport errors are retried
  // with exponential backoff; any other failure, or the last failed attempt,
  // fails the job and keeps the outputs completed so far.
  JobState run_job(const std::string& job_id, const PipelineDeps& deps);

  // Records SME feedback on a reported job and exports its grades as qrels.
  // A context document graded 0 reruns from retrieval with every graded-0
  // document excluded; hazard edits alone rerun from extraction; anything
  // else only records the feedback. A rerun produces the next report version.
  JobState apply_feedback(const std::string& job_id, SmeFeedback feedback, const PipelineDeps& deps);

  std::vector<TraceEntry> get_trace(const std::string& job_id) const;
  JobState status(const std::string& job_id) const { return store_.load(job_id); }

  JobStore& store() { return store_; }
  const PipelineConfig& config() const { return config_; }

 private:
  JobState advance(const std::string& job_id, const PipelineDeps& deps);
  json run_stage(Stage target, const JobState& job, const PipelineDeps& deps, llm::CallLog& log);
  json stage_input(Stage target, const JobState& job) const;

  class RunGuard;

  JobStore& store_;
  PipelineConfig config_;
  Sleeper sleeper_;
  NowFn now_;
  std::mutex running_mutex_;
  std::set<std::string> running_;
};

// Applies SME hazard edits, in order, to extracted pairs. Edits naming a
// hazard that is no longer present are skipped.
std::vector<agents::HazardControlPair> apply_hazard_edits(std::vector<agents::HazardControlPair> pairs,
                                                          const std::vector<HazardEdit>& edits,
                                                          const std::string& workplan_id);

}  // namespace harness::orchestrator
