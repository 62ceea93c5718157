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

// harness: command line front end for corpus ingestion, indexing, analysis
// jobs, SME feedback, reports, evaluation and the HTTP service.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harness/app/workspace.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"
#include "harness/eval/eval.hpp"
#include "harness/reporting/report.hpp"
#include "harness/service/service.hpp"

namespace fs = std::filesystem;
using namespace harness;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return 2;
    case ErrorCode::not_found: return 3;
    case ErrorCode::conflict: return 4;
    case ErrorCode::backend_unavailable: return 5;
    case ErrorCode::internal: return 1;
  }
  return 1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw ValidationError(p.string() + " is not valid JSON", e.what());
  }
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + out_path);
  out << text;
}

std::vector<corpus::Document> read_documents(const fs::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw NotFoundError("cannot read " + jsonl.string());
  std::vector<corpus::Document> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (corpus::normalize(line).empty()) continue;
    try {
      out.push_back(corpus::document_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError(jsonl.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

json stats_json(const corpus::CorpusStats& s) {
  json rejected = json::array();
  for (const auto& r : s.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
  return {{"documents", s.doc_count}, {"chunks", s.chunk_count}, {"undated", s.undated}, {"rejected", rejected}};
}

struct Globals {
  std::string config_file;
  std::string data_dir;
  std::string llm;
  std::string embedder;
};

app::AppConfig load_config(const Globals& g) {
  auto cfg = app::AppConfig::load(g.config_file.empty() ? std::nullopt : std::optional<fs::path>(g.config_file));
  if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
  if (!g.llm.empty()) cfg.llm = g.llm;
  if (!g.embedder.empty()) cfg.embedder = g.embedder;
  return cfg;
}

service::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Hazard forecasting pipeline: retrieval, analysis agents, reports and evaluation"};
  cli.require_subcommand(1);
  Globals g;
  cli.add_option("--config", g.config_file, "key = value config file")->check(CLI::ExistingFile);
  cli.add_option("--data-dir", g.data_dir, "workspace directory (overrides config)");
  cli.add_option("--llm", g.llm, "generation backend: fixture:<path> | http:<url> | none");
  cli.add_option("--embedder", g.embedder, "embedding backend: mock | mock-<dim> | http:<url>");

  // ingest
  auto* ingest = cli.add_subcommand("ingest", "Ingest a JSON Lines corpus file");
  std::string ingest_file;
  bool ingest_policies = false;
  std::size_t max_tokens = 0, overlap = 0;
  ingest->add_option("file", ingest_file, "JSON Lines records")->required()->check(CLI::ExistingFile);
  ingest->add_flag("--policies", ingest_policies, "ingest into the policy corpus");
  ingest->add_option("--max-tokens", max_tokens, "chunk size in tokens (config default)");
  ingest->add_option("--overlap", overlap, "chunk overlap in tokens (config default)");

  // index build
  auto* index_cmd = cli.add_subcommand("index", "Vector index maintenance");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "Embed both corpora and save the indexes");

  // query
  auto* query = cli.add_subcommand("query", "Ad-hoc smart retrieval");
  std::string query_text, query_workplan, query_variant;
  std::size_t query_k = 0;
  query->add_option("text", query_text, "query text");
  query->add_option("--workplan", query_workplan, "work plan JSON used as a document query")->check(CLI::ExistingFile);
  query->add_option("--variant", query_variant, "evaluation variant for --workplan (TREC run output)");
  query->add_option("-k,--k", query_k, "documents to return");

  // analyze
  auto* analyze = cli.add_subcommand("analyze", "Create and run an analysis job for a work plan");
  std::string analyze_file, analyze_format = "json", analyze_out;
  analyze->add_option("workplan", analyze_file, "work plan JSON")->required()->check(CLI::ExistingFile);
  analyze->add_option("--format", analyze_format, "json | markdown | html");
  analyze->add_option("-o,--out", analyze_out, "write the report here instead of stdout");

  // job status|trace
  auto* job = cli.add_subcommand("job", "Inspect jobs");
  job->require_subcommand(1);
  std::string job_id;
  auto* job_status = job->add_subcommand("status", "Job stage and outputs");
  job_status->add_option("job_id", job_id)->required();
  auto* job_trace = job->add_subcommand("trace", "Ordered trace entries");
  job_trace->add_option("job_id", job_id)->required();
  auto* job_list = job->add_subcommand("list", "All job ids");

  // feedback
  auto* feedback = cli.add_subcommand("feedback", "Apply SME feedback to a reported job");
  std::string feedback_job, feedback_file;
  feedback->add_option("job_id", feedback_job)->required();
  feedback->add_option("feedback", feedback_file, "feedback JSON")->required()->check(CLI::ExistingFile);

  // report
  auto* report = cli.add_subcommand("report", "Print a stored report");
  std::string report_job, report_format = "json", report_out;
  int report_version = 0;
  report->add_option("job_id", report_job)->required();
  report->add_option("--version", report_version, "report version (latest by default)");
  report->add_option("--format", report_format, "json | markdown | html");
  report->add_option("-o,--out", report_out, "output file");

  // eval
  auto* eval_cmd = cli.add_subcommand("eval", "Evaluation harness");
  eval_cmd->require_subcommand(1);

  auto* eval_retrieval = eval_cmd->add_subcommand("retrieval", "P@k, R@k and F1@k of TREC run files");
  std::vector<std::string> run_files;
  std::string qrels_file, relevance = "ge1", csv_out, md_out, pool_out;
  std::size_t eval_k = 5, pool_depth = 10, pool_cap = 25;
  bool sample_std = false;
  eval_retrieval->add_option("--runs", run_files, "TREC run files")->required()->check(CLI::ExistingFile);
  eval_retrieval->add_option("--qrels", qrels_file, "qrels file (needed unless only pooling)");
  eval_retrieval->add_option("--k", eval_k, "cutoff");
  eval_retrieval->add_option("--relevance", relevance, "ge1 (grade >= 1) | eq2 (grade 2)");
  eval_retrieval->add_flag("--sample-std", sample_std, "sample instead of population deviation");
  eval_retrieval->add_option("--csv", csv_out, "write metrics CSV");
  eval_retrieval->add_option("--md", md_out, "write metrics Markdown");
  eval_retrieval->add_option("--pool", pool_out, "write the judgment pool (query_id doc_id per line)");
  eval_retrieval->add_option("--pool-depth", pool_depth);
  eval_retrieval->add_option("--pool-cap", pool_cap);

  auto* eval_variants = eval_cmd->add_subcommand("variants", "Write one TREC run file per retrieval variant");
  std::string variants_workplans, variants_out;
  std::vector<std::string> variant_names;
  eval_variants->add_option("--workplans", variants_workplans, "JSON Lines work plans (query id = doc_id)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_variants->add_option("--out-dir", variants_out, "directory for <variant>.run files")->required();
  eval_variants->add_option("--variants", variant_names, "subset of variants (all by default)");

  auto* eval_judge = eval_cmd->add_subcommand("judge", "Score reports with the judge backend");
  std::vector<std::string> judge_reports;
  std::string judge_workplan, judge_backend;
  eval_judge->add_option("--reports", judge_reports, "report files (json or markdown)")->required()->check(CLI::ExistingFile);
  eval_judge->add_option("--workplan", judge_workplan, "work plan JSON")->required()->check(CLI::ExistingFile);
  eval_judge->add_option("--judge", judge_backend, "judge backend spec (defaults to --llm)");
  eval_judge->add_option("--csv", csv_out);
  eval_judge->add_option("--md", md_out);

  auto* eval_embed = eval_cmd->add_subcommand("embeddings", "Answer correctness and query time per embedding backend");
  std::string qa_file, answerer_kind = "extractive", judge_kind = "containment";
  std::vector<std::string> backends;
  bool perfect = false;
  std::size_t embed_k = 3;
  eval_embed->add_option("--qa", qa_file, "QA JSON Lines (question, reference, source_doc)")->required()->check(CLI::ExistingFile);
  eval_embed->add_option("--backends", backends, "embedding backend ids")->required();
  eval_embed->add_flag("--perfect-retrieval", perfect, "retrieve each question's source document");
  eval_embed->add_option("--answerer", answerer_kind, "extractive | llm");
  eval_embed->add_option("--judge", judge_kind, "containment | llm");
  eval_embed->add_option("--k", embed_k, "passages per question");
  eval_embed->add_option("--csv", csv_out);
  eval_embed->add_option("--md", md_out);

  // serve
  auto* serve = cli.add_subcommand("serve", "Run the HTTP service");
  std::string serve_host;
  int serve_port = -1;
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);

  CLI11_PARSE(cli, argc, argv);

  try {
    auto cfg = load_config(g);

    if (ingest->parsed()) {
      app::Workspace ws(cfg);
      corpus::ChunkingPolicy policy{cfg.chunk_max_tokens, cfg.chunk_overlap};
      if (ingest->count("--max-tokens") > 0) policy.max_tokens = max_tokens;
      if (ingest->count("--overlap") > 0) policy.overlap_tokens = overlap;
      auto& store = ingest_policies ? ws.policies() : ws.incidents();
      const auto stats = store.ingest(ingest_file, policy);
      std::cout << canonical_dump_pretty(stats_json(stats));
      return stats.rejected.empty() ? 0 : 2;
    }

    if (index_build->parsed()) {
      app::Workspace ws(cfg);
      ws.build_indexes();
      std::cout << canonical_dump_pretty({{"backend", ws.embedder().descriptor().backend_id},
                                          {"incident_chunks", ws.incident_index().size()},
                                          {"policy_chunks", ws.policies().chunks().size()}});
      return 0;
    }

    if (query->parsed()) {
      app::Workspace ws(cfg);
      auto deps = ws.deps();
      retrieval::RetrievalDeps rd{deps.embedder, deps.index, deps.corpus, deps.llm, deps.cross, deps.terms};
      auto rc = cfg.pipeline.retrieval;
      if (query_k) rc.final_k = query_k;
      if (!query_workplan.empty()) {
        const auto wp = corpus::document_from_json(read_json(query_workplan));
        const auto variant = query_variant.empty() ? retrieval::Variant::current_best : retrieval::parse_variant(query_variant);
        const auto docs = retrieval::run_variant(wp, variant, rd, rc);
        std::cout << retrieval::format_run(wp.doc_id, docs, std::string(retrieval::to_string(variant)));
        return 0;
      }
      if (corpus::normalize(query_text).empty()) throw ValidationError("give a query text or --workplan");
      const auto run = retrieval::run_smart(retrieval::Query::from_text(query_text), rd, rc, cfg.pipeline.interpret);
      json docs = json::array();
      for (const auto& d : run.documents) docs.push_back({{"doc_id", d.doc_id}, {"score", round6(d.score)}});
      std::cout << canonical_dump_pretty({{"documents", docs},
                                          {"decomposition", retrieval::to_string(run.interpretation.reason)},
                                          {"notes", run.log.notes}});
      return 0;
    }

    if (analyze->parsed()) {
      app::Workspace ws(cfg);
      const auto format = reporting::parse_format(analyze_format);
      const auto wp = corpus::document_from_json(read_json(analyze_file));
      auto deps = ws.deps();
      const auto id = ws.orchestrator().create_job(wp);
      const auto state = ws.orchestrator().run_job(id, deps);
      std::cerr << "job " << id << " " << orchestrator::to_string(state.stage) << "\n";
      if (state.stage != orchestrator::Stage::reported) {
        std::cerr << canonical_dump_pretty(orchestrator::status_json(state));
        return 1;
      }
      write_text(analyze_out,
                 read_file(reporting::report_path(ws.jobs().reports_dir(), id, state.latest_version(), format)));
      return 0;
    }

    if (job_status->parsed() || job_trace->parsed() || job_list->parsed()) {
      orchestrator::JobStore store(cfg.data_dir);
      if (job_list->parsed()) {
        for (const auto& id : store.list()) std::cout << id << "\n";
        return 0;
      }
      const auto state = store.load(job_id);
      if (job_status->parsed()) {
        std::cout << canonical_dump_pretty(orchestrator::status_json(state));
      } else {
        for (const auto& e : state.trace) std::cout << canonical_dump(orchestrator::to_json(e)) << "\n";
      }
      return 0;
    }

    if (feedback->parsed()) {
      app::Workspace ws(cfg);
      auto fb = orchestrator::feedback_from_json(read_json(feedback_file));
      const auto state = ws.orchestrator().apply_feedback(feedback_job, std::move(fb), ws.deps());
      std::cout << canonical_dump_pretty(orchestrator::status_json(state));
      return state.stage == orchestrator::Stage::reported ? 0 : 1;
    }

    if (report->parsed()) {
      orchestrator::JobStore store(cfg.data_dir);
      const auto state = store.load(report_job);
      if (state.report_versions.empty()) throw NotFoundError("job " + report_job + " has no report");
      const int version = report_version ? report_version : state.latest_version();
      write_text(report_out,
                 read_file(reporting::report_path(store.reports_dir(), report_job, version, reporting::parse_format(report_format))));
      return 0;
    }

    if (eval_retrieval->parsed()) {
      std::vector<eval::RunFile> runs;
      for (const auto& f : run_files) runs.push_back(eval::RunFile::load(f));
      if (!pool_out.empty()) {
        std::ostringstream out;
        for (const auto& [q, docs] : eval::pool(runs, pool_depth, pool_cap)) {
          for (const auto& d : docs) out << q << " " << d << "\n";
        }
        write_text(pool_out, out.str());
      }
      if (qrels_file.empty()) {
        if (pool_out.empty()) throw ValidationError("--qrels is required to compute metrics");
        return 0;
      }
      const auto qrels = eval::Qrels::load(qrels_file);
      const auto rule = eval::parse_relevance_rule(relevance);
      std::vector<eval::MetricRow> rows;
      for (const auto& r : runs) rows.push_back(eval::evaluate_run(r, qrels, eval_k, rule, !sample_std));
      if (!csv_out.empty()) write_text(csv_out, eval::metrics_csv(rows, eval_k));
      const auto md = eval::metrics_markdown(rows, eval_k);
      if (!md_out.empty()) write_text(md_out, md);
      std::cout << md;
      for (const auto& r : rows) {
        for (const auto& q : r.excluded_queries) {
          std::cerr << r.variant_tag << ": query " << q << " has no relevant documents; excluded from R and F1\n";
        }
      }
      return 0;
    }

    if (eval_variants->parsed()) {
      app::Workspace ws(cfg);
      auto deps = ws.deps();
      retrieval::RetrievalDeps rd{deps.embedder, deps.index, deps.corpus, deps.llm, deps.cross, deps.terms};
      std::vector<retrieval::Variant> variants;
      for (const auto& n : variant_names) variants.push_back(retrieval::parse_variant(n));
      if (variants.empty()) variants = retrieval::all_variants();
      const auto workplans = read_documents(variants_workplans);
      fs::create_directories(variants_out);
      for (auto v : variants) {
        const std::string tag(retrieval::to_string(v));
        std::string text;
        for (const auto& wp : workplans) text += retrieval::format_run(wp.doc_id, retrieval::run_variant(wp, v, rd, cfg.pipeline.retrieval), tag);
        write_text((fs::path(variants_out) / (tag + ".run")).string(), text);
        std::cout << (fs::path(variants_out) / (tag + ".run")).string() << "\n";
      }
      return 0;
    }

    if (eval_judge->parsed()) {
      auto judge = llm::make_generator(judge_backend.empty() ? cfg.llm : judge_backend);
      const auto wp = corpus::document_from_json(read_json(judge_workplan));
      const std::string wp_text = retrieval::canonical_text(wp);
      std::vector<std::pair<std::string, eval::JudgeScores>> rows;
      for (const auto& f : judge_reports) rows.emplace_back(fs::path(f).filename().string(), eval::judge_report(read_file(f), wp_text, *judge));
      if (!csv_out.empty()) write_text(csv_out, eval::judge_csv(rows));
      const auto md = eval::judge_markdown(rows);
      if (!md_out.empty()) write_text(md_out, md);
      std::cout << md;
      return 0;
    }

    if (eval_embed->parsed()) {
      cfg.llm = g.llm.empty() ? cfg.llm : g.llm;
      auto corpus_store = std::make_shared<corpus::CorpusStore>(corpus::CorpusStore::open(cfg.data_dir / "corpus"));
      if (corpus_store->empty()) throw ValidationError("the incident corpus is empty; ingest it first");
      const auto qa = eval::load_qa(qa_file);
      std::vector<eval::BenchmarkBackend> rows;
      for (const auto& b : backends) {
        rows.push_back({b, [b, corpus_store, perfect, embed_k]() -> eval::Retriever {
                          if (perfect) return eval::source_retriever(corpus_store);
                          std::shared_ptr<const index::Embedder> embedder = index::make_embedder(b);
                          auto idx = std::make_shared<index::VectorIndex>(index::build_index(*corpus_store, *embedder));
                          return eval::index_retriever(corpus_store, embedder, idx, embed_k);
                        }});
      }
      std::shared_ptr<const llm::Generator> llm_backend = llm::make_generator(cfg.llm);
      auto answerer = answerer_kind == "llm" ? eval::llm_answerer(llm_backend) : eval::extractive_answerer();
      if (answerer_kind != "llm" && answerer_kind != "extractive") throw ValidationError("answerer must be extractive or llm");
      auto judge = judge_kind == "llm" ? eval::llm_agreement_judge(llm_backend) : eval::containment_judge();
      if (judge_kind != "llm" && judge_kind != "containment") throw ValidationError("judge must be containment or llm");
      const auto result = eval::benchmark_embeddings(qa, rows, answerer, judge);
      if (!csv_out.empty()) write_text(csv_out, eval::benchmark_csv(result));
      const auto md = eval::benchmark_markdown(result);
      if (!md_out.empty()) write_text(md_out, md);
      std::cout << md;
      for (const auto& r : result) {
        if (r.skipped) std::cerr << r.model << ": skipped (" << r.note << ")\n";
        for (const auto& q : r.decoy_questions) std::cerr << r.model << ": decoy retrieved for \"" << q << "\"\n";
      }
      return 0;
    }

    if (serve->parsed()) {
      app::Workspace ws(cfg);
      service::Service svc(ws, {cfg.bearer_token, true});
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const std::string host = serve_host.empty() ? cfg.host : serve_host;
      const int port = serve_port >= 0 ? serve_port : cfg.port;
      std::cerr << "listening on " << host << ":" << port << "\n";
      svc.serve(host, port);
      g_service = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << canonical_dump(service::ApiError{e.code(), e.what(), e.detail()}.to_json()) << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << canonical_dump(service::ApiError{ErrorCode::internal, e.what(), ""}.to_json()) << "\n";
    return 1;
  }
  return 0;
}
