#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaxplan/harness/metrics.hpp"

namespace relaxplan {

// Report rendering: a fixed-width table mirroring the benchmark's two
// summary tables, a per-task CSV, and a machine-readable JSON document
// that embeds the records so every aggregate can be recomputed.

enum class ReportFormat { table, csv, machine };

namespace report_fmt {

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string cell(const FamilyAggregate& agg, double value) {
  return agg.tasks == 0 ? "N/A" : fixed2(value);
}

inline std::string pad(const std::string& s, size_t width) {
  std::string out = s;
  while (out.size() < width) out += ' ';
  return out;
}

}  // namespace report_fmt

inline std::string render_table(const BenchReport& report) {
  using report_fmt::cell;
  using report_fmt::pad;
  std::string out;
  out += "backend: " + report.backend;
  if (!report.model_id.empty()) out += " (" + report.model_id + ")";
  out += "  seed: " + std::to_string(report.seed);
  out += "  " + report.config_summary + "\n\n";

  out += pad("split", 16) + pad("SR(%) Ground+Plan", 19) + pad("SR(%) Plan only", 17) +
         pad("SR(%) w/ Possibility", 22) + "\n";
  auto sr_row = [&](const std::string& name, const FamilyAggregate& agg) {
    out += pad(name, 16) + pad(cell(agg, agg.sr_ground_plan), 19) +
           pad(cell(agg, agg.sr_plan_only), 17) + pad(cell(agg, agg.sr_with_possibility), 22) +
           "\n";
  };
  for (const auto& [fam, agg] : report.per_family) sr_row(fam, agg);
  sr_row("ALL", report.global);
  out += "\n";

  out += pad("split", 16) + pad("SR (%)", 10) + pad("Plan Length", 13) +
         pad("Planning Time (s)", 19) + pad("Expanded Nodes", 16) + pad("Avg. Relaxations", 18) +
         "\n";
  auto stat_row = [&](const std::string& name, const FamilyAggregate& agg) {
    out += pad(name, 16) + pad(cell(agg, agg.sr_ground_plan), 10) +
           pad(cell(agg, agg.avg_plan_length), 13) + pad(cell(agg, agg.avg_time_s), 19) +
           pad(cell(agg, agg.avg_expanded), 16) + pad(cell(agg, agg.avg_relaxations), 18) + "\n";
  };
  for (const auto& [fam, agg] : report.per_family) stat_row(fam, agg);
  stat_row("ALL", report.global);

  if (!report.refinements_curve.empty()) {
    out += "\nrefinements per relaxation:";
    for (size_t i = 0; i < report.refinements_curve.size(); ++i)
      out += " r" + std::to_string(i) + "=" + report_fmt::fixed2(report.refinements_curve[i]);
    out += "\n";
  }
  return out;
}

inline std::string render_csv(const BenchReport& report) {
  std::string out =
      "task_id,family,scene_id,success_planning,success_grounding,possibility,"
      "plan_length,planning_time_s,expanded_nodes,relaxations,refinements,failure_note\n";
  for (const auto& r : report.records) {
    int total_ref = 0;
    for (int n : r.refinements_per_relaxation) total_ref += n;
    out += r.task_id + "," + family_name(r.family) + "," + r.scene_id + "," +
           (r.success_planning ? "1" : "0") + "," + (r.success_grounding ? "1" : "0") + "," +
           (r.possibility_verdict ? (*r.possibility_verdict ? "1" : "0") : "") + "," +
           std::to_string(r.plan_length) + "," + report_fmt::fixed2(r.planning_time_s) + "," +
           std::to_string(r.expanded_nodes) + "," + std::to_string(r.relaxations) + "," +
           std::to_string(total_ref) + "," + r.failure_note + "\n";
  }
  return out;
}

inline nlohmann::json report_to_json(const BenchReport& report) {
  nlohmann::json doc;
  doc["schema"] = "relaxplan.bench_report/1";
  doc["run"] = {{"backend", report.backend},
                {"model_id", report.model_id},
                {"seed", report.seed},
                {"workers", report.workers},
                {"config", report.config_summary}};
  auto agg_json = [](const FamilyAggregate& a) {
    return nlohmann::json{{"tasks", a.tasks},
                          {"sr_ground_plan", a.sr_ground_plan},
                          {"sr_plan_only", a.sr_plan_only},
                          {"sr_with_possibility", a.sr_with_possibility},
                          {"avg_plan_length", a.avg_plan_length},
                          {"avg_time_s", a.avg_time_s},
                          {"avg_expanded", a.avg_expanded},
                          {"avg_relaxations", a.avg_relaxations}};
  };
  doc["global"] = agg_json(report.global);
  auto& fams = doc["per_family"] = nlohmann::json::object();
  for (const auto& [fam, agg] : report.per_family) fams[fam] = agg_json(agg);
  doc["refinements_curve"] = report.refinements_curve;
  auto& records = doc["records"] = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json j = {{"task_id", r.task_id},
                        {"family", family_name(r.family)},
                        {"scene_id", r.scene_id},
                        {"success_planning", r.success_planning},
                        {"success_grounding", r.success_grounding},
                        {"plan_length", r.plan_length},
                        {"planning_time_s", r.planning_time_s},
                        {"expanded_nodes", r.expanded_nodes},
                        {"relaxations", r.relaxations},
                        {"refinements_per_relaxation", r.refinements_per_relaxation},
                        {"failure_note", r.failure_note}};
    if (r.possibility_verdict)
      j["possibility"] = *r.possibility_verdict;
    else
      j["possibility"] = nullptr;
    records.push_back(std::move(j));
  }
  return doc;
}

inline std::string render_report(const BenchReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::table: return render_table(report);
    case ReportFormat::csv: return render_csv(report);
    case ReportFormat::machine: return report_to_json(report).dump(2) + "\n";
  }
  return "";
}

/// Reads the machine format back; aggregates are recomputed from the
/// embedded records, so a parsed report always satisfies its own math.
inline Result<BenchReport> parse_machine_report(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& ex) {
    return Error{ErrCode::io, std::string("machine report: ") + ex.what()};
  }
  try {
    std::vector<TaskRecord> records;
    for (const auto& j : doc.at("records")) {
      TaskRecord r;
      r.task_id = j.at("task_id").get<std::string>();
      auto fam = family_from_name(j.at("family").get<std::string>());
      if (!fam.ok()) return fam.error();
      r.family = fam.value();
      r.scene_id = j.at("scene_id").get<std::string>();
      r.success_planning = j.at("success_planning").get<bool>();
      r.success_grounding = j.at("success_grounding").get<bool>();
      if (!j.at("possibility").is_null()) r.possibility_verdict = j.at("possibility").get<bool>();
      r.plan_length = j.at("plan_length").get<long>();
      r.planning_time_s = j.at("planning_time_s").get<double>();
      r.expanded_nodes = j.at("expanded_nodes").get<long>();
      r.relaxations = j.at("relaxations").get<int>();
      r.refinements_per_relaxation =
          j.at("refinements_per_relaxation").get<std::vector<int>>();
      r.failure_note = j.value("failure_note", "");
      records.push_back(std::move(r));
    }
    BenchReport report = aggregate(std::move(records));
    report.backend = doc.at("run").at("backend").get<std::string>();
    report.model_id = doc.at("run").at("model_id").get<std::string>();
    report.seed = doc.at("run").at("seed").get<uint64_t>();
    report.workers = doc.at("run").at("workers").get<int>();
    report.config_summary = doc.at("run").at("config").get<std::string>();
    return report;
  } catch (const nlohmann::json::exception& ex) {
    return Error{ErrCode::io, std::string("machine report: ") + ex.what()};
  }
}

}  // namespace relaxplan
