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

#include "harness/orchestrator/orchestrator.hpp"

#include <algorithm>

#include "harness/common/digest.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"
#include "harness/reporting/report.hpp"

namespace harness::orchestrator {
namespace {

json candidate_json(const retrieval::RetrievalCandidate& c) {
  return {{"chunk_id", c.chunk_id},
          {"doc_id", c.doc_id},
          {"best_query_sim", round6(c.best_query_sim)},
          {"rerank_score", c.rerank_score ? json(round6(*c.rerank_score)) : json(nullptr)}};
}

retrieval::ContextSet context_from_output(const json& retrieved) {
  retrieval::ContextSet ctx;
  for (const auto& c : retrieved.at("context")) {
    retrieval::RetrievalCandidate cand;
    cand.chunk_id = c.at("chunk_id").get<std::string>();
    cand.doc_id = c.at("doc_id").get<std::string>();
    cand.best_query_sim = c.at("best_query_sim").get<double>();
    if (!c.at("rerank_score").is_null()) cand.rerank_score = c.at("rerank_score").get<double>();
    ctx.chunks.push_back(std::move(cand));
  }
  ctx.k = retrieved.value("k", ctx.chunks.size());
  return ctx;
}

std::vector<std::string> context_docs(const json& retrieved) {
  std::vector<std::string> out;
  for (const auto& c : retrieved.at("context")) {
    auto id = c.at("doc_id").get<std::string>();
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
  }
  return out;
}

std::vector<agents::HazardControlPair> pairs_from_output(const json& extracted) {
  std::vector<agents::HazardControlPair> out;
  for (const auto& p : extracted.at("pairs")) out.push_back(agents::pair_from_json(p));
  return out;
}

json event(const char* type, json body) {
  body["type"] = type;
  return body;
}

std::string join_notes(const llm::CallLog& log, const std::string& extra) {
  std::string out = extra;
  if (log.repairs > 0) out += (out.empty() ? "" : "; ") + std::string("repairs=") + std::to_string(log.repairs);
  for (const auto& n : log.notes) out += (out.empty() ? "" : "; ") + n;
  return out;
}

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  if (attempt < 1) throw ValidationError("attempts are 1-based");
  return base_backoff * (1LL << std::min(attempt - 1, 30));
}

std::string_view agent_for(Stage s) {
  switch (s) {
    case Stage::summarized: return "summarizer";
    case Stage::retrieved: return "smart_rag";
    case Stage::hazards_extracted: return "hazard_control_extractor";
    case Stage::coverage_done: return "hazard_control_matcher";
    case Stage::fmea_done: return "fmea_engine";
    case Stage::policies_done: return "policy_matcher";
    case Stage::reported: return "report_generator";
    default: break;
  }
  throw ValidationError("no agent produces stage " + std::string(to_string(s)));
}

std::vector<agents::HazardControlPair> apply_hazard_edits(std::vector<agents::HazardControlPair> pairs,
                                                          const std::vector<HazardEdit>& edits,
                                                          const std::string& workplan_id) {
  for (const auto& e : edits) {
    const auto target = corpus::ascii_lower(corpus::normalize(e.hazard));
    auto matches = [&](const agents::HazardControlPair& p) { return corpus::ascii_lower(p.hazard) == target; };
    switch (e.op) {
      case EditOp::add: {
        agents::HazardControlPair p{corpus::normalize(e.hazard), std::nullopt, workplan_id, 1.0};
        if (e.control && !corpus::normalize(*e.control).empty()) p.control = corpus::normalize(*e.control);
        const bool dup = std::any_of(pairs.begin(), pairs.end(), [&](const agents::HazardControlPair& q) {
          return matches(q) && q.control == p.control && q.provenance_doc_id == p.provenance_doc_id;
        });
        if (!dup) pairs.push_back(std::move(p));
        break;
      }
      case EditOp::remove:
        pairs.erase(std::remove_if(pairs.begin(), pairs.end(), matches), pairs.end());
        break;
      case EditOp::modify:
        for (auto& p : pairs) {
          if (matches(p)) p.hazard = corpus::normalize(*e.replacement);
        }
        break;
    }
  }
  return pairs;
}

class Orchestrator::RunGuard {
 public:
  RunGuard(Orchestrator& o, std::string id) : o_(o), id_(std::move(id)) {
    std::lock_guard lock(o_.running_mutex_);
    if (!o_.running_.insert(id_).second) throw ConflictError("job " + id_ + " is already running");
  }
  ~RunGuard() {
    std::lock_guard lock(o_.running_mutex_);
    o_.running_.erase(id_);
  }
  RunGuard(const RunGuard&) = delete;
  RunGuard& operator=(const RunGuard&) = delete;

 private:
  Orchestrator& o_;
  std::string id_;
};

Orchestrator::Orchestrator(JobStore& store, PipelineConfig config, Sleeper sleeper, NowFn now)
    : store_(store), config_(std::move(config)), sleeper_(std::move(sleeper)), now_(std::move(now)) {
  config_.retrieval.validate();
  if (config_.retry.max_attempts < 1) throw ValidationError("retry max_attempts must be at least 1");
  if (config_.critical_threshold < 1 || config_.critical_threshold > 25) {
    throw ValidationError("critical threshold must be within 1..25");
  }
}

std::string Orchestrator::create_job(const corpus::Document& workplan) {
  corpus::Document doc = corpus::normalized(workplan);
  if (doc.doc_id.empty()) throw ValidationError("work plan needs a doc_id");
  if (doc.body.empty() && doc.summary.empty()) throw ValidationError("work plan has neither body nor summary");
  const std::string id = store_.allocate_id(doc);
  store_.append(id, event("created", {{"job_id", id}, {"workplan", corpus::to_json(doc)},
                                      {"at", format_timestamp(now_())}}));
  return id;
}

std::vector<TraceEntry> Orchestrator::get_trace(const std::string& job_id) const { return store_.load(job_id).trace; }

JobState Orchestrator::run_job(const std::string& job_id, const PipelineDeps& deps) {
  RunGuard guard(*this, job_id);
  const auto job = store_.load(job_id);
  if (job.stage != Stage::created) {
    throw ConflictError("job " + job_id + " is at stage " + std::string(to_string(job.stage)) +
                        "; only a created job can be run");
  }
  return advance(job_id, deps);
}

json Orchestrator::stage_input(Stage target, const JobState& job) const {
  json prior = json::object();
  for (const auto& [s, out] : job.outputs) prior[std::string(to_string(s))] = out;
  json edits = json::array();
  for (const auto& f : job.feedback) {
    for (const auto& e : f.hazard_edits) edits.push_back(to_json(e));
  }
  return {{"stage", to_string(target)},
          {"workplan", corpus::to_json(job.workplan)},
          {"prior", prior},
          {"excluded_docs", job.excluded_docs},
          {"hazard_edits", edits}};
}

json Orchestrator::run_stage(Stage target, const JobState& job, const PipelineDeps& deps, llm::CallLog& log) {
  auto need = [&](Stage s) -> const json& {
    const json* out = job.output(s);
    if (out == nullptr) throw Error(ErrorCode::internal, "missing output of stage " + std::string(to_string(s)));
    return *out;
  };

  switch (target) {
    case Stage::summarized:
      return agents::to_json(agents::summarize(job.workplan, deps.llm, &log));

    case Stage::retrieved: {
      retrieval::RetrievalDeps rd{deps.embedder, deps.index, deps.corpus, deps.llm, deps.cross, deps.terms};
      auto run = retrieval::run_smart(retrieval::Query::from_doc(job.workplan), rd, config_.retrieval,
                                      config_.interpret, job.excluded_docs);
      for (auto& n : run.log.notes) log.note(std::move(n));
      log.repairs += run.log.repairs;
      log.calls += run.log.calls;
      log.template_digests.insert(log.template_digests.end(), run.log.template_digests.begin(),
                                  run.log.template_digests.end());
      json context = json::array();
      for (const auto& c : run.context.chunks) context.push_back(candidate_json(c));
      json subqueries = json::array();
      for (const auto& sq : run.interpretation.subqueries) {
        json expansions = json::array();
        for (const auto& e : sq.expansions) expansions.push_back({{"text", e.text}, {"sim_to_parent", round6(e.sim_to_parent)}});
        subqueries.push_back({{"text", sq.text}, {"expansions", expansions}});
      }
      return {{"context", context},
              {"k", run.context.k},
              {"pool_size", run.pool_size},
              {"filtered_size", run.filtered_size},
              {"rerank_fell_back", run.rerank_fell_back},
              {"decomposition", retrieval::to_string(run.interpretation.reason)},
              {"subqueries", subqueries},
              {"excluded_docs", job.excluded_docs}};
    }

    case Stage::hazards_extracted: {
      const auto docs = context_docs(need(Stage::retrieved));
      std::vector<agents::HazardControlPair> pairs;
      for (const auto& doc_id : docs) {
        const auto* doc = deps.corpus.find(doc_id);
        if (doc == nullptr) throw Error(ErrorCode::internal, "context document " + doc_id + " vanished from the corpus");
        auto found = agents::extract_pairs(doc->primary_text(), doc_id, deps.llm, &log);
        if (deps.hazard_db != nullptr) deps.hazard_db->put(doc_id, found);
        pairs.insert(pairs.end(), found.begin(), found.end());
      }
      std::vector<HazardEdit> edits;
      for (const auto& f : job.feedback) edits.insert(edits.end(), f.hazard_edits.begin(), f.hazard_edits.end());
      pairs = apply_hazard_edits(std::move(pairs), edits, job.workplan.doc_id);
      json arr = json::array();
      for (const auto& p : pairs) arr.push_back(agents::to_json(p));
      return {{"pairs", arr}, {"documents", docs}, {"edits_applied", edits.size()}};
    }

    case Stage::coverage_done: {
      const auto summary = agents::summary_from_json(need(Stage::summarized));
      const auto hazards = agents::distinct_hazards(pairs_from_output(need(Stage::hazards_extracted)));
      auto report = agents::match_coverage(hazards, summary.controls_mentioned, deps.embedder, config_.coverage);
      json out = agents::to_json(report);
      out["plan_controls"] = summary.controls_mentioned;
      out["thresholds"] = {{"covered", round6(config_.coverage.covered)}, {"weak", round6(config_.coverage.weak)}};
      return out;
    }

    case Stage::fmea_done: {
      const auto summary = agents::summary_from_json(need(Stage::summarized));
      const auto pairs = pairs_from_output(need(Stage::hazards_extracted));
      auto modes = agents::run_fmea(summary, agents::distinct_hazards(pairs), pairs, job.workplan.doc_id, deps.llm,
                                    config_.critical_threshold, &log);
      json arr = json::array();
      for (const auto& m : modes) arr.push_back(agents::to_json(m));
      return {{"failure_modes", arr}, {"critical_threshold", config_.critical_threshold}};
    }

    case Stage::policies_done: {
      const auto hazards = agents::distinct_hazards(pairs_from_output(need(Stage::hazards_extracted)));
      std::vector<agents::PolicySubject> subjects;
      for (std::size_t i = 0; i < hazards.size(); ++i) subjects.push_back({"hazard:" + std::to_string(i), hazards[i]});
      const auto& modes = need(Stage::fmea_done).at("failure_modes");
      for (std::size_t m = 0; m < modes.size(); ++m) {
        if (!modes[m].at("critical").get<bool>()) continue;
        const auto& mitigations = modes[m].at("mitigations");
        for (std::size_t j = 0; j < mitigations.size(); ++j) {
          subjects.push_back({"mitigation:" + std::to_string(m) + "." + std::to_string(j), mitigations[j].get<std::string>()});
        }
      }
      auto alignment = agents::match_policies(subjects, deps.policies, deps.embedder, config_.policy_threshold);
      for (const auto& w : alignment.warnings) log.note(w);
      json subj = json::array();
      for (const auto& s : subjects) subj.push_back({{"ref", s.ref}, {"text", s.text}});
      json matches = json::array();
      for (const auto& m : alignment.matches) matches.push_back(agents::to_json(m));
      return {{"subjects", subj},
              {"matches", matches},
              {"unmapped", alignment.unmapped},
              {"warnings", alignment.warnings},
              {"threshold", round6(config_.policy_threshold)}};
    }

    case Stage::reported: {
      const int version = job.latest_version() + 1;
      std::optional<reporting::Narrative> narrative;
      if (config_.narrative) {
        try {
          const auto skeleton = reporting::assemble(job, version, deps.corpus);
          narrative = reporting::generate_narrative(skeleton, context_from_output(need(Stage::retrieved)), deps.corpus,
                                                    deps.llm, &log);
        } catch (const Error& e) {
          reporting::Narrative unavailable;
          unavailable.available = false;
          unavailable.note = std::string("narrative unavailable: ") + e.what();
          log.note(unavailable.note);
          narrative = std::move(unavailable);
        }
      }
      const auto report = reporting::assemble(job, version, deps.corpus, narrative);
      const auto problems = reporting::validate_report(report, deps.corpus, deps.policies.store());
      if (!problems.empty()) throw AgentError("report_generator", "report failed validation: " + problems.front());
      const auto files = reporting::write_report_files(report, store_.reports_dir());
      json names = json::array();
      for (const auto& f : files) names.push_back(f.filename().string());
      return {{"version", version},
              {"report_id", report.at("report_id")},
              {"report_digest", json_digest(report)},
              {"files", names}};
    }

    default:
      break;
  }
  throw Error(ErrorCode::internal, "stage " + std::string(to_string(target)) + " cannot be run");
}

JobState Orchestrator::advance(const std::string& job_id, const PipelineDeps& deps) {
  auto job = store_.load(job_id);
  while (job.stage != Stage::reported && job.stage != Stage::failed) {
    const Stage target = next_stage(job.stage);
    const std::string input_digest = json_digest(stage_input(target, job));
    bool done = false;
    for (int attempt = 1; !done; ++attempt) {
      TraceEntry entry;
      entry.agent_name = std::string(agent_for(target));
      entry.stage = target;
      entry.attempt = attempt;
      entry.input_digest = input_digest;
      entry.started_at = now_();
      llm::CallLog log;
      try {
        json output = run_stage(target, job, deps, log);
        entry.ended_at = std::max(now_(), entry.started_at);
        entry.output_digest = json_digest(output);
        entry.status = TraceStatus::ok;
        entry.note = join_notes(log, "");
        entry.prompt_digests = log.template_digests;
        store_.append(job_id, event("trace", {{"entry", to_json(entry)}}));
        store_.append(job_id, event("stage", {{"stage", to_string(target)}, {"output", output}}));
        done = true;
      } catch (const std::exception& e) {
        entry.ended_at = std::max(now_(), entry.started_at);
        entry.prompt_digests = log.template_digests;
        const auto* transport = dynamic_cast<const TransportError*>(&e);
        const bool retry = transport != nullptr && attempt < config_.retry.max_attempts;
        entry.status = retry ? TraceStatus::retried : TraceStatus::failed;
        std::string what = e.what();
        if (const auto* agent = dynamic_cast<const AgentError*>(&e)) what = agent->agent() + ": " + what;
        entry.note = join_notes(log, (transport ? "transport error: " : "error: ") + what);
        store_.append(job_id, event("trace", {{"entry", to_json(entry)}}));
        if (retry) {
          sleeper_(config_.retry.backoff(attempt));
          continue;
        }
        store_.append(job_id, event("failed", {{"stage", to_string(target)}, {"error", what}}));
        done = true;
      }
    }
    job = store_.load(job_id);
  }
  return job;
}

JobState Orchestrator::apply_feedback(const std::string& job_id, SmeFeedback feedback, const PipelineDeps& deps) {
  RunGuard guard(*this, job_id);
  auto job = store_.load(job_id);
  if (!feedback.job_id.empty() && feedback.job_id != job_id) {
    throw ValidationError("feedback names job " + feedback.job_id + " but was sent to " + job_id);
  }
  if (job.stage != Stage::reported) {
    throw ConflictError("job " + job_id + " is at stage " + std::string(to_string(job.stage)) +
                        "; feedback needs a reported job");
  }
  feedback.job_id = job_id;
  if (feedback.at == Timestamp{}) feedback.at = now_();
  for (const auto& [doc, grade] : feedback.event_grades) {
    if (grade < 0 || grade > 2) throw ValidationError("grade for '" + doc + "' must be 0, 1 or 2");
    if (deps.corpus.find(doc) == nullptr) throw ValidationError("graded document '" + doc + "' is not in the corpus");
  }
  // Edits must name hazards that exist at the time they apply.
  auto hazards = agents::distinct_hazards(pairs_from_output(*job.output(Stage::hazards_extracted)));
  for (const auto& e : feedback.hazard_edits) {
    const auto target = corpus::ascii_lower(corpus::normalize(e.hazard));
    auto it = std::find_if(hazards.begin(), hazards.end(),
                           [&](const std::string& h) { return corpus::ascii_lower(h) == target; });
    if (e.op == EditOp::add) {
      if (target.empty()) throw ValidationError("added hazard is empty");
      if (it == hazards.end()) hazards.push_back(corpus::normalize(e.hazard));
    } else if (it == hazards.end()) {
      throw ValidationError("hazard edit names unknown hazard '" + e.hazard + "'");
    } else if (e.op == EditOp::remove) {
      hazards.erase(it);
    } else {
      *it = corpus::normalize(*e.replacement);
    }
  }

  store_.append(job_id, event("feedback", {{"feedback", to_json(feedback)}}));
  store_.append_qrels(job_id, feedback.event_grades);
  job = store_.load(job_id);

  std::set<std::string> graded_zero;
  for (const auto& [doc, grade] : job.grades()) {
    if (grade == 0) graded_zero.insert(doc);
  }
  const auto in_context = context_docs(*job.output(Stage::retrieved));
  const bool context_hit = std::any_of(in_context.begin(), in_context.end(),
                                       [&](const std::string& d) { return graded_zero.count(d) > 0; });
  std::optional<Stage> resume_after;
  std::set<std::string> excluded = job.excluded_docs;
  if (context_hit) {
    resume_after = Stage::summarized;
    excluded = graded_zero;
  } else if (!feedback.hazard_edits.empty()) {
    resume_after = Stage::retrieved;
  }
  if (!resume_after) return job;

  store_.append(job_id, event("rerun", {{"resume_after", to_string(*resume_after)}, {"excluded_docs", excluded}}));
  return advance(job_id, deps);
}

}  // namespace harness::orchestrator
