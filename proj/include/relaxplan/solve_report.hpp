#pragma once

#include <string>

#include <json.hpp>

#include "relaxplan/orchestrator.hpp"
#include "relaxplan/pddl/printer.hpp"

namespace relaxplan {

// Stable JSON schema for one solve run: configuration, the full trace,
// every intermediate PDDL text, plans, feedback, and timing.

namespace report_detail {

inline nlohmann::json feedback_to_json(const std::vector<FeedbackItem>& items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& item : items) {
    nlohmann::json j = {{"source", feedback_source_name(item.source)},
                        {"severity", item.severity == Severity::error ? "error" : "warning"},
                        {"message", item.message}};
    if (std::holds_alternative<int>(item.locus))
      j["step"] = std::get<int>(item.locus);
    else if (std::holds_alternative<std::string>(item.locus))
      j["path"] = std::get<std::string>(item.locus);
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::json events_to_json(const std::vector<TraceEvent>& events) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : events)
    arr.push_back({{"kind", e.kind}, {"ok", e.ok}, {"detail", e.detail}});
  return arr;
}

inline nlohmann::json stats_to_json(const SearchStats& s) {
  return {{"expanded_nodes", s.expanded_nodes},
          {"generated_nodes", s.generated_nodes},
          {"plan_length", s.plan_length},
          {"wall_time_s", s.wall_time}};
}

}  // namespace report_detail

inline nlohmann::json solve_report_json(const SolveResult& result, const SolveConfig& cfg,
                                        const std::string& backend_name,
                                        const std::string& goal_text,
                                        const std::string& scene_id) {
  nlohmann::json doc;
  doc["schema"] = "relaxplan.solve_report/1";
  doc["backend"] = backend_name;
  doc["goal"] = goal_text;
  doc["scene_id"] = scene_id;
  doc["config"] = {{"max_outer", cfg.max_outer},
                   {"max_inner", cfg.max_inner},
                   {"mode", cfg.mode == SearchMode::bfs ? "bfs" : "gbfs_hadd"},
                   {"max_expanded", cfg.limits.max_expanded},
                   {"max_seconds", cfg.limits.max_seconds},
                   {"possibility_check", cfg.possibility_check}};
  doc["outcome"] = result.grounded() ? "grounded" : "exhausted";
  if (result.possibility)
    doc["possibility"] = {{"possible", result.possibility->possible},
                          {"rationale", result.possibility->rationale}};
  else
    doc["possibility"] = nullptr;
  doc["stats"] = report_detail::stats_to_json(result.stats);

  nlohmann::json trace;
  trace["semantic_distance"] = result.trace.semantic_distance;
  trace["total_relaxations"] = result.trace.total_relaxations;
  trace["total_refinements"] = result.trace.total_refinements;
  trace["setup_events"] = report_detail::events_to_json(result.trace.setup_events);
  auto& steps = trace["steps"] = nlohmann::json::array();
  for (const auto& s : result.trace.steps) {
    nlohmann::json j = {{"relaxation", s.relaxation},
                        {"shift", s.shift},
                        {"refinements", s.refinements},
                        {"goal_text", s.goal_text},
                        {"problem_snapshot", s.problem_snapshot},
                        {"plan_outcome", s.plan_outcome},
                        {"plan_valid", s.plan_valid},
                        {"feedback", report_detail::feedback_to_json(s.feedback)},
                        {"search", report_detail::stats_to_json(s.search_stats)},
                        {"events", report_detail::events_to_json(s.events)}};
    if (s.grounding_ok)
      j["grounding_ok"] = *s.grounding_ok;
    else
      j["grounding_ok"] = nullptr;
    auto& um = j["unmatched"] = nlohmann::json::array();
    for (const auto& u : s.unmatched)
      um.push_back({{"step", u.step}, {"arg", u.arg}, {"symbol", u.symbol}});
    steps.push_back(std::move(j));
  }
  doc["trace"] = std::move(trace);
  doc["artifacts"] = result.artifacts;
  if (result.plan) {
    auto& plan = doc["plan"] = nlohmann::json::array();
    for (const auto& step : result.plan->steps) plan.push_back(step.to_string());
  } else {
    doc["plan"] = nullptr;
  }
  return doc;
}

}  // namespace relaxplan
