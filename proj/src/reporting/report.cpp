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

#include "harness/reporting/report.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "harness/agents/agents.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::reporting {
namespace fs = std::filesystem;
using orchestrator::Stage;

namespace {

const json& stage_output(const orchestrator::JobState& job, Stage s) {
  const json* out = job.output(s);
  if (out == nullptr) {
    throw ValidationError("job " + job.job_id + " has no output for stage " + std::string(orchestrator::to_string(s)));
  }
  return *out;
}

// Rounds every float so that the canonical bytes parse back to equal values.
void round_floats(json& j) {
  if (j.is_number_float()) {
    j = round6(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_floats(child);
  }
}

std::string lower(const std::string& s) { return corpus::ascii_lower(s); }

json section_title_map() {
  return {{"workplan_summary", "Work Plan Summary"},
          {"retrieved_events", "Retrieved Events"},
          {"hazard_control_analysis", "Hazard-Control Analysis"},
          {"critical_failures", "Critical Failures"},
          {"policy_mappings", "Policy Mappings"},
          {"overall_risk_profile", "Overall Risk Profile"}};
}

std::string scalar_text(const json& v) {
  if (v.is_null()) return "none";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
    return buf;
  }
  if (v.is_number()) return v.dump();
  return canonical_dump(v);
}

std::string cell_text(const json& v) {
  if (v.is_array()) {
    if (v.empty()) return "none";
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : "; ") + cell_text(x);
    return out;
  }
  return scalar_text(v);
}

bool is_table(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  return std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_object(); });
}

std::vector<std::string> columns_of(const json& rows) {
  std::set<std::string> keys;
  for (const auto& r : rows) {
    for (const auto& [k, _] : r.items()) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

// ---- markdown

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

void md_table(std::ostringstream& out, const json& rows) {
  const auto cols = columns_of(rows);
  out << "|";
  for (const auto& c : cols) out << " " << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << " --- |";
  out << "\n";
  for (const auto& r : rows) {
    out << "|";
    for (const auto& c : cols) out << " " << md_escape(r.contains(c) ? cell_text(r.at(c)) : std::string("none")) << " |";
    out << "\n";
  }
}

void md_object(std::ostringstream& out, const json& obj, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& [key, value] : obj.items()) {
    if (is_table(value)) {
      out << "\n" << indent << "**" << key << "**\n\n";
      md_table(out, value);
      out << "\n";
    } else if (value.is_object()) {
      out << indent << "- **" << key << "**:\n";
      md_object(out, value, depth + 1);
    } else {
      out << indent << "- **" << key << "**: " << md_escape(cell_text(value)) << "\n";
    }
  }
}

std::string render_markdown(const json& report) {
  std::ostringstream out;
  const auto titles = section_title_map();
  out << "# Vulnerability Analysis Report: " << md_escape(report.at("title").get<std::string>()) << "\n\n";
  for (const char* key : {"report_id", "job_id", "version", "workplan_id"}) {
    out << "- **" << key << "**: " << scalar_text(report.at(key)) << "\n";
  }
  if (report.contains("narrative")) {
    const auto& n = report.at("narrative");
    out << "\n**Narrative** (available: " << scalar_text(n.at("available")) << ")\n\n";
    if (!n.at("note").get<std::string>().empty()) out << "_note: " << md_escape(n.at("note").get<std::string>()) << "_\n\n";
    for (const auto& p : n.at("paragraphs")) {
      out << p.at("text").get<std::string>() << "\n\n";
      out << "_citations: " << md_escape(cell_text(p.at("citations")))
          << (p.at("flagged").get<bool>() ? "; flagged: uncited paragraph" : "; flagged: false") << "_\n\n";
    }
  }
  for (std::string_view key : kSectionKeys) {
    const std::string k(key);
    out << "\n## " << titles.at(k).get<std::string>() << "\n\n";
    const auto& section = report.at("sections").at(k);
    if (is_table(section)) {
      md_table(out, section);
    } else if (section.is_object()) {
      md_object(out, section, 0);
    } else {
      out << md_escape(cell_text(section)) << "\n";
    }
  }
  return out.str();
}

// ---- html

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

void html_table(std::ostringstream& out, const json& rows) {
  const auto cols = columns_of(rows);
  out << "<table>\n<thead><tr>";
  for (const auto& c : cols) out << "<th>" << html_escape(c) << "</th>";
  out << "</tr></thead>\n<tbody>\n";
  for (const auto& r : rows) {
    out << "<tr>";
    for (const auto& c : cols) out << "<td>" << html_escape(r.contains(c) ? cell_text(r.at(c)) : std::string("none")) << "</td>";
    out << "</tr>\n";
  }
  out << "</tbody>\n</table>\n";
}

void html_object(std::ostringstream& out, const json& obj) {
  out << "<ul>\n";
  for (const auto& [key, value] : obj.items()) {
    out << "<li><strong>" << html_escape(key) << "</strong>: ";
    if (is_table(value)) {
      out << "\n";
      html_table(out, value);
    } else if (value.is_object()) {
      out << "\n";
      html_object(out, value);
    } else {
      out << html_escape(cell_text(value));
    }
    out << "</li>\n";
  }
  out << "</ul>\n";
}

std::string render_html(const json& report) {
  std::ostringstream out;
  const auto titles = section_title_map();
  const std::string title = "Vulnerability Analysis Report: " + report.at("title").get<std::string>();
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>" << html_escape(title)
      << "</title>\n</head>\n<body>\n<h1>" << html_escape(title) << "</h1>\n<ul>\n";
  for (const char* key : {"report_id", "job_id", "version", "workplan_id"}) {
    out << "<li><strong>" << key << "</strong>: " << html_escape(scalar_text(report.at(key))) << "</li>\n";
  }
  out << "</ul>\n";
  if (report.contains("narrative")) {
    const auto& n = report.at("narrative");
    out << "<div class=\"narrative\" data-available=\"" << scalar_text(n.at("available")) << "\">\n";
    if (!n.at("note").get<std::string>().empty()) out << "<p class=\"note\">" << html_escape(n.at("note").get<std::string>()) << "</p>\n";
    for (const auto& p : n.at("paragraphs")) {
      out << "<p data-citations=\"" << html_escape(cell_text(p.at("citations"))) << "\" data-flagged=\""
          << scalar_text(p.at("flagged")) << "\">" << html_escape(p.at("text").get<std::string>()) << "</p>\n";
    }
    out << "</div>\n";
  }
  for (std::string_view key : kSectionKeys) {
    const std::string k(key);
    out << "<section id=\"" << k << "\">\n<h2>" << html_escape(titles.at(k).get<std::string>()) << "</h2>\n";
    const auto& section = report.at("sections").at(k);
    if (is_table(section)) {
      html_table(out, section);
    } else if (section.is_object()) {
      html_object(out, section);
    } else {
      out << "<p>" << html_escape(cell_text(section)) << "</p>\n";
    }
    out << "</section>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

std::vector<std::string> context_doc_ids(const retrieval::ContextSet& context) {
  std::vector<std::string> out;
  for (const auto& c : context.chunks) {
    if (std::find(out.begin(), out.end(), c.doc_id) == out.end()) out.push_back(c.doc_id);
  }
  return out;
}

}  // namespace

json to_json(const Narrative& n) {
  json paragraphs = json::array();
  for (const auto& p : n.paragraphs) {
    paragraphs.push_back({{"text", p.text}, {"citations", p.citations}, {"flagged", p.flagged}});
  }
  return {{"paragraphs", paragraphs}, {"available", n.available}, {"note", n.note}};
}

Narrative narrative_from_json(const json& j) {
  Narrative n;
  for (const auto& p : j.at("paragraphs")) {
    n.paragraphs.push_back({p.at("text").get<std::string>(), p.at("citations").get<std::vector<std::string>>(),
                            p.at("flagged").get<bool>()});
  }
  n.available = j.at("available").get<bool>();
  n.note = j.value("note", "");
  return n;
}

Narrative generate_narrative(const json& report, const retrieval::ContextSet& context,
                             const corpus::CorpusStore& corpus, const llm::Generator& llm, llm::CallLog* log) {
  if (context.chunks.empty()) throw ValidationError("narrative needs a non-empty context set");
  const auto docs = context_doc_ids(context);
  std::string context_text;
  for (const auto& c : context.chunks) {
    const auto* chunk = corpus.find_chunk(c.chunk_id);
    if (chunk == nullptr) throw ValidationError("context chunk '" + c.chunk_id + "' is not in the corpus");
    std::string text = chunk->text;
    while (!text.empty() && text.back() == ' ') text.pop_back();
    context_text += "[" + c.doc_id + "] " + text + "\n";
  }
  auto request = llm::render_prompt("narrative", {{"report", canonical_dump(report.at("sections"))},
                                                  {"context", context_text},
                                                  {"example_id", docs.front()}});
  if (log) log->record(request);
  const std::string reply = llm.generate(request);

  Narrative n;
  std::string normalized = reply;
  normalized.erase(std::remove(normalized.begin(), normalized.end(), '\r'), normalized.end());
  std::size_t start = 0;
  while (start <= normalized.size()) {
    std::size_t end = normalized.find("\n\n", start);
    if (end == std::string::npos) end = normalized.size();
    std::string para = corpus::normalize(normalized.substr(start, end - start));
    if (!para.empty()) {
      NarrativeParagraph p;
      p.text = para;
      for (std::size_t open = para.find('['); open != std::string::npos; open = para.find('[', open + 1)) {
        const auto close = para.find(']', open);
        if (close == std::string::npos) break;
        const auto id = para.substr(open + 1, close - open - 1);
        if (std::find(docs.begin(), docs.end(), id) != docs.end() &&
            std::find(p.citations.begin(), p.citations.end(), id) == p.citations.end()) {
          p.citations.push_back(id);
        }
      }
      p.flagged = p.citations.empty();
      if (p.flagged && log) log->note("narrative: paragraph " + std::to_string(n.paragraphs.size() + 1) + " cites no context document");
      n.paragraphs.push_back(std::move(p));
    }
    start = end + 2;
  }
  if (n.paragraphs.empty()) throw Error(ErrorCode::backend_unavailable, "narrative backend returned no text");
  return n;
}

json recount_risk_profile(const json& sections) {
  const auto& coverage = sections.at("hazard_control_analysis").at("coverage");
  const auto& modes = sections.at("critical_failures").at("failure_modes");
  const auto& policy = sections.at("policy_mappings");
  int critical = 0;
  int max_risk = 0;
  for (const auto& m : modes) {
    if (m.at("critical").get<bool>()) ++critical;
    max_risk = std::max(max_risk, m.at("risk").get<int>());
  }
  const auto covered = coverage.at("covered").size();
  const auto weak = coverage.at("weak").size();
  const auto uncovered = coverage.at("uncovered").size();
  return {{"hazards_total", covered + weak + uncovered},
          {"hazards_covered", covered},
          {"hazards_weak", weak},
          {"hazards_uncovered", uncovered},
          {"failure_modes_total", modes.size()},
          {"critical_modes", critical},
          {"max_risk", max_risk},
          {"policy_matches", policy.at("matches").size()},
          {"unmapped_subjects", policy.at("unmapped").size()},
          {"events_retrieved", sections.at("retrieved_events").at("events").size()}};
}

json assemble(const orchestrator::JobState& job, int version, const corpus::CorpusStore& corpus,
              const std::optional<Narrative>& narrative) {
  if (version < 1) throw ValidationError("report version must be positive");
  const auto& summary = stage_output(job, Stage::summarized);
  const auto& retrieved = stage_output(job, Stage::retrieved);
  const auto& extracted = stage_output(job, Stage::hazards_extracted);
  const auto& coverage = stage_output(job, Stage::coverage_done);
  const auto& fmea = stage_output(job, Stage::fmea_done);
  const auto& policies = stage_output(job, Stage::policies_done);
  const auto grades = job.grades();
  const std::string workplan_id = job.workplan.doc_id;

  json sections;
  json s = summary;
  s["workplan_id"] = workplan_id;
  s["title"] = job.workplan.event_name;
  sections["workplan_summary"] = s;

  // Events: rerank score descending (first-stage similarity when the
  // reranker fell back), ties by doc_id.
  std::vector<json> events;
  for (const auto& c : retrieved.at("context")) {
    const auto doc_id = c.at("doc_id").get<std::string>();
    const auto* doc = corpus.find(doc_id);
    if (doc == nullptr) throw ValidationError("retrieved document '" + doc_id + "' is not in the corpus");
    json e = {{"doc_id", doc_id},
              {"chunk_id", c.at("chunk_id")},
              {"event_name", doc->event_name},
              {"event_date", doc->event_date ? json(*doc->event_date) : json(nullptr)},
              {"best_query_sim", c.at("best_query_sim")},
              {"rerank_score", c.at("rerank_score")}};
    auto g = grades.find(doc_id);
    e["grade"] = g == grades.end() ? json(nullptr) : json(g->second);
    events.push_back(std::move(e));
  }
  auto key = [](const json& e) {
    return e.at("rerank_score").is_null() ? -std::numeric_limits<double>::infinity() : e.at("rerank_score").get<double>();
  };
  std::stable_sort(events.begin(), events.end(), [&](const json& a, const json& b) {
    if (key(a) != key(b)) return key(a) > key(b);
    const double sa = a.at("best_query_sim").get<double>(), sb = b.at("best_query_sim").get<double>();
    if (sa != sb) return sa > sb;
    return a.at("doc_id").get<std::string>() < b.at("doc_id").get<std::string>();
  });
  sections["retrieved_events"] = {{"events", events}, {"excluded_docs", job.excluded_docs}};

  // Hazards alphabetical.
  std::vector<json> pairs(extracted.at("pairs").begin(), extracted.at("pairs").end());
  std::stable_sort(pairs.begin(), pairs.end(), [](const json& a, const json& b) {
    auto ka = std::make_tuple(lower(a.at("hazard").get<std::string>()), a.at("provenance_doc_id").get<std::string>(),
                              a.at("control").is_null() ? std::string() : a.at("control").get<std::string>());
    auto kb = std::make_tuple(lower(b.at("hazard").get<std::string>()), b.at("provenance_doc_id").get<std::string>(),
                              b.at("control").is_null() ? std::string() : b.at("control").get<std::string>());
    return ka < kb;
  });
  std::map<std::string, std::set<std::string>> sources_of;
  for (const auto& p : pairs) {
    sources_of[lower(p.at("hazard").get<std::string>())].insert(p.at("provenance_doc_id").get<std::string>());
  }
  auto sources = [&](const std::string& hazard) {
    auto it = sources_of.find(lower(hazard));
    if (it == sources_of.end()) return std::vector<std::string>{workplan_id};
    return std::vector<std::string>(it->second.begin(), it->second.end());
  };
  auto rows = [&](const json& matches) {
    std::vector<json> out;
    for (const auto& m : matches) {
      json r = m;
      r["sources"] = sources(m.at("hazard").get<std::string>());
      out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const json& a, const json& b) {
      return lower(a.at("hazard").get<std::string>()) < lower(b.at("hazard").get<std::string>());
    });
    return out;
  };
  std::vector<std::string> uncovered = coverage.at("uncovered").get<std::vector<std::string>>();
  std::stable_sort(uncovered.begin(), uncovered.end(),
                   [](const std::string& a, const std::string& b) { return lower(a) < lower(b); });
  sections["hazard_control_analysis"] = {
      {"pairs", pairs},
      {"plan_controls", coverage.at("plan_controls")},
      {"coverage", {{"covered", rows(coverage.at("covered"))}, {"weak", rows(coverage.at("weak"))}, {"uncovered", uncovered}}}};

  std::vector<json> modes(fmea.at("failure_modes").begin(), fmea.at("failure_modes").end());
  std::stable_sort(modes.begin(), modes.end(), [](const json& a, const json& b) {
    if (a.at("risk") != b.at("risk")) return a.at("risk").get<int>() > b.at("risk").get<int>();
    return a.at("description").get<std::string>() < b.at("description").get<std::string>();
  });
  sections["critical_failures"] = {{"critical_threshold", fmea.at("critical_threshold")}, {"failure_modes", modes}};

  std::vector<json> matches(policies.at("matches").begin(), policies.at("matches").end());
  std::stable_sort(matches.begin(), matches.end(), [](const json& a, const json& b) {
    const double sa = a.at("sim").get<double>(), sb = b.at("sim").get<double>();
    if (sa != sb) return sa > sb;
    if (a.at("subject_ref") != b.at("subject_ref")) return a.at("subject_ref").get<std::string>() < b.at("subject_ref").get<std::string>();
    return a.at("policy_id").get<std::string>() < b.at("policy_id").get<std::string>();
  });
  sections["policy_mappings"] = {{"threshold", policies.at("threshold")},
                                 {"subjects", policies.at("subjects")},
                                 {"matches", matches},
                                 {"unmapped", policies.at("unmapped")},
                                 {"warnings", policies.at("warnings")}};

  sections["overall_risk_profile"] = recount_risk_profile(sections);

  char report_id[160];
  std::snprintf(report_id, sizeof report_id, "%s.v%d", job.job_id.c_str(), version);
  json report = {{"report_id", report_id},
                 {"job_id", job.job_id},
                 {"version", version},
                 {"workplan_id", workplan_id},
                 {"title", job.workplan.event_name},
                 {"sections", sections}};
  if (narrative) report["narrative"] = to_json(*narrative);
  round_floats(report);
  return report;
}

std::vector<std::string> validate_report(const json& report, const corpus::CorpusStore& corpus,
                                         const corpus::CorpusStore* policies) {
  std::vector<std::string> problems;
  try {
    for (const char* key : {"report_id", "job_id", "version", "workplan_id", "title", "sections"}) {
      if (!report.contains(key)) problems.push_back(std::string("missing field ") + key);
    }
    if (!problems.empty()) return problems;
    const auto& sections = report.at("sections");
    for (auto key : kSectionKeys) {
      if (!sections.contains(std::string(key))) problems.push_back("missing section " + std::string(key));
    }
    if (!problems.empty()) return problems;
    if (recount_risk_profile(sections) != sections.at("overall_risk_profile")) {
      problems.push_back("overall_risk_profile does not match the section contents");
    }
    const auto workplan_id = report.at("workplan_id").get<std::string>();
    auto known_doc = [&](const std::string& id) { return id == workplan_id || corpus.find(id) != nullptr; };
    for (const auto& e : sections.at("retrieved_events").at("events")) {
      if (corpus.find(e.at("doc_id").get<std::string>()) == nullptr) {
        problems.push_back("event " + e.at("doc_id").get<std::string>() + " is not in the corpus");
      }
    }
    for (const auto& p : sections.at("hazard_control_analysis").at("pairs")) {
      if (!known_doc(p.at("provenance_doc_id").get<std::string>())) {
        problems.push_back("pair provenance " + p.at("provenance_doc_id").get<std::string>() + " does not resolve");
      }
    }
    for (const auto& m : sections.at("critical_failures").at("failure_modes")) {
      for (const auto& s : m.at("sources")) {
        if (!known_doc(s.get<std::string>())) problems.push_back("failure mode source " + s.get<std::string>() + " does not resolve");
      }
      if (m.at("risk").get<int>() != m.at("severity").get<int>() * m.at("likelihood").get<int>()) {
        problems.push_back("risk is not severity x likelihood for '" + m.at("description").get<std::string>() + "'");
      }
    }
    if (policies != nullptr) {
      for (const auto& m : sections.at("policy_mappings").at("matches")) {
        const auto* doc = policies->find(m.at("policy_id").get<std::string>());
        if (doc == nullptr) {
          problems.push_back("policy " + m.at("policy_id").get<std::string>() + " is not in the policy corpus");
        } else if (corpus::normalize(doc->primary_text()).find(m.at("excerpt").get<std::string>()) == std::string::npos) {
          problems.push_back("excerpt for policy " + m.at("policy_id").get<std::string>() + " is not verbatim");
        }
      }
    }
  } catch (const json::exception& e) {
    problems.push_back(std::string("malformed report: ") + e.what());
  }
  return problems;
}

Format parse_format(std::string_view text) {
  if (text == "json") return Format::json;
  if (text == "md" || text == "markdown") return Format::markdown;
  if (text == "html") return Format::html;
  throw ValidationError("unknown report format '" + std::string(text) + "' (json, markdown, html)");
}

std::string_view extension(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::markdown: return "md";
    case Format::html: return "html";
  }
  return "json";
}

std::string render(const json& report, Format format) {
  switch (format) {
    case Format::json: return canonical_dump_pretty(report);
    case Format::markdown: return render_markdown(report);
    case Format::html: return render_html(report);
  }
  throw ValidationError("unknown report format");
}

fs::path report_path(const fs::path& dir, const std::string& job_id, int version, Format format) {
  return dir / (job_id + ".v" + std::to_string(version) + ".report." + std::string(extension(format)));
}

std::vector<fs::path> write_report_files(const json& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto job_id = report.at("job_id").get<std::string>();
  const int version = report.at("version").get<int>();
  std::vector<fs::path> written;
  for (Format f : {Format::json, Format::markdown, Format::html}) {
    const auto path = report_path(dir, job_id, version, f);
    const std::string bytes = render(report, f);
    if (fs::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream existing;
      existing << in.rdbuf();
      if (existing.str() != bytes) throw ConflictError("report " + path.filename().string() + " already exists");
    } else {
      const fs::path tmp = path.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << bytes;
        if (!out) throw Error(ErrorCode::internal, "cannot write " + tmp.string());
      }
      fs::rename(tmp, path);
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace harness::reporting
