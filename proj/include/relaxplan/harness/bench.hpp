#pragma once

#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "relaxplan/harness/dataset.hpp"
#include "relaxplan/harness/metrics.hpp"
#include "relaxplan/orchestrator.hpp"
#include "relaxplan/pddl/parser.hpp"
#include "relaxplan/semantic/llm_backend.hpp"
#include "relaxplan/semantic/scripted_backend.hpp"
#include "relaxplan/solve_report.hpp"

namespace relaxplan {

// Benchmark execution: per task, scatter the task items with a seed
// derived from (global seed, task id), distill, solve, and score.
// Workers process disjoint tasks; aggregation happens after the join.

enum class BackendKind { scripted, llm };

struct BenchConfig {
  SolveConfig solve;
  BackendKind backend = BackendKind::scripted;
  LlmConfig llm;             // used when backend == llm
  uint64_t seed = 0;
  int workers = 1;
  bool use_ground_truth_domain = false;  // skip domain generation when the split provides one
};

struct BenchOutcome {
  BenchReport report;
  std::vector<nlohmann::json> solve_reports;  // parallel to report.records
};

namespace bench_detail {

inline TaskRecord failed_record(const TaskSpec& task, const std::string& note) {
  TaskRecord rec;
  rec.task_id = task.id;
  rec.family = task.family;
  rec.scene_id = task.scene_id;
  rec.failure_note = note;
  return rec;
}

inline TaskRecord record_from_result(const TaskSpec& task, const SolveResult& result) {
  TaskRecord rec;
  rec.task_id = task.id;
  rec.family = task.family;
  rec.scene_id = task.scene_id;
  rec.success_grounding = result.grounded();
  for (const auto& step : result.trace.steps) {
    if (step.plan_valid) rec.success_planning = true;
    rec.refinements_per_relaxation.push_back(step.refinements);
    if (step.plan_valid) rec.plan_length = step.search_stats.plan_length;
  }
  rec.relaxations = result.trace.total_relaxations;
  rec.planning_time_s = result.stats.wall_time;
  rec.expanded_nodes = result.stats.expanded_nodes;
  if (result.possibility) rec.possibility_verdict = result.possibility->possible;
  return rec;
}

struct TaskRun {
  TaskRecord record;
  nlohmann::json solve_report;
};

inline TaskRun run_one(const TaskSpec& task, const BenchConfig& cfg) {
  TaskRun out;
  auto scene_file = load_scene_file(task.scene_file);
  if (!scene_file.ok()) {
    out.record = failed_record(task, scene_file.error().describe());
    return out;
  }
  SceneGraph scene = std::move(scene_file).take();
  if (!task.items_to_scatter.empty()) {
    auto scattered =
        scatter_items(scene, task.items_to_scatter, mix_seed(cfg.seed, task.id));
    if (!scattered.ok()) {
      out.record = failed_record(task, scattered.error().describe());
      return out;
    }
    scene = std::move(scattered).take();
  }
  DistilledScene distilled = distill(scene);

  std::unique_ptr<SemanticBackend> backend;
  if (cfg.backend == BackendKind::scripted) {
    auto table = load_rule_table(task.rules_file);
    if (!table.ok()) {
      out.record = failed_record(task, table.error().describe());
      return out;
    }
    backend = std::make_unique<ScriptedBackend>(std::move(table).take());
  } else {
    backend = std::make_unique<LlmBackend>(cfg.llm);
  }

  std::optional<pddl::DomainAst> initial_domain;
  if (cfg.use_ground_truth_domain) {
    std::string domain_file = task.ground_truth.domain_file ? *task.ground_truth.domain_file
                                                            : task.family_domain_file;
    auto text = dataset_detail::read_file(domain_file);
    if (!text.ok()) {
      out.record = failed_record(task, text.error().describe());
      return out;
    }
    auto parsed = pddl::parse_domain(text.value());
    if (!parsed.ok()) {
      out.record = failed_record(task, parsed.error().describe());
      return out;
    }
    initial_domain = std::move(parsed).take();
  }

  auto result =
      solve(*backend, task.goal_text, distilled, task.domain_desc, initial_domain, cfg.solve);
  if (!result.ok()) {
    out.record = failed_record(task, result.error().describe());
    return out;
  }
  out.record = record_from_result(task, result.value());
  out.solve_report = solve_report_json(result.value(), cfg.solve, backend->name(),
                                       task.goal_text, distilled.scene_id);
  out.solve_report["task_id"] = task.id;
  out.solve_report["family"] = family_name(task.family);
  return out;
}

}  // namespace bench_detail

inline BenchOutcome run_bench(const std::vector<TaskSpec>& tasks, const BenchConfig& cfg) {
  std::vector<bench_detail::TaskRun> runs(tasks.size());
  std::atomic<size_t> next{0};
  int workers = std::max(1, cfg.workers);

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        runs[i] = bench_detail::run_one(tasks[i], cfg);
      } catch (const std::exception& ex) {
        // a crashing task is a failed record, never a failed batch
        runs[i].record = bench_detail::failed_record(tasks[i], std::string("crash: ") + ex.what());
      } catch (...) {
        runs[i].record = bench_detail::failed_record(tasks[i], "crash: unknown exception");
      }
    }
  };

  if (workers == 1 || tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<TaskRecord> records;
  records.reserve(runs.size());
  for (auto& r : runs) records.push_back(std::move(r.record));

  BenchOutcome outcome;
  outcome.report = aggregate(std::move(records));
  outcome.report.backend = cfg.backend == BackendKind::scripted ? "scripted" : "llm";
  outcome.report.model_id = cfg.backend == BackendKind::llm ? cfg.llm.model : "";
  outcome.report.seed = cfg.seed;
  outcome.report.workers = workers;
  outcome.report.config_summary =
      "max_outer=" + std::to_string(cfg.solve.max_outer) +
      " max_inner=" + std::to_string(cfg.solve.max_inner) +
      " mode=" + (cfg.solve.mode == SearchMode::bfs ? "bfs" : "gbfs_hadd") +
      " possibility_check=" + (cfg.solve.possibility_check ? "on" : "off");

  // reorder solve reports to match the sorted records
  for (const auto& rec : outcome.report.records) {
    for (auto& run : runs) {
      if (run.solve_report.is_object() && run.solve_report.value("task_id", "") == rec.task_id) {
        outcome.solve_reports.push_back(std::move(run.solve_report));
        break;
      }
    }
  }
  return outcome;
}

}  // namespace relaxplan
