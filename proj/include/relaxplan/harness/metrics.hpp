#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaxplan/harness/dataset.hpp"

namespace relaxplan {

// Per-task outcomes and their aggregation into the benchmark report:
// three success-rate variants, plan statistics over successful tasks,
// relaxation averages, and the refinements-per-relaxation curve.

struct TaskRecord {
  std::string task_id;
  TaskFamily family = TaskFamily::dining_setup;
  std::string scene_id;
  bool success_planning = false;   // a validated plan was produced
  bool success_grounding = false;  // the run ended Grounded
  std::optional<bool> possibility_verdict;
  long plan_length = 0;
  double planning_time_s = 0.0;    // summed over planner calls
  long expanded_nodes = 0;         // summed over planner calls
  int relaxations = 0;
  std::vector<int> refinements_per_relaxation;  // index = relaxation level reached
  std::string failure_note;        // non-empty when the task crashed or errored
};

struct FamilyAggregate {
  int tasks = 0;
  double sr_ground_plan = 0.0;      // NaN-free: 0 when tasks == 0
  double sr_plan_only = 0.0;
  double sr_with_possibility = 0.0;
  double avg_plan_length = 0.0;     // over planning successes
  double avg_time_s = 0.0;
  double avg_expanded = 0.0;
  double avg_relaxations = 0.0;     // over all tasks
};

struct BenchReport {
  std::vector<TaskRecord> records;  // sorted by task id
  std::map<std::string, FamilyAggregate> per_family;
  FamilyAggregate global;
  std::vector<double> refinements_curve;  // mean refinements by relaxation index
  // run metadata
  std::string backend;
  std::string model_id;
  uint64_t seed = 0;
  int workers = 1;
  std::string config_summary;
};

namespace metrics_detail {

inline double percent(long hits, long total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

inline FamilyAggregate aggregate_records(const std::vector<const TaskRecord*>& records) {
  FamilyAggregate agg;
  agg.tasks = static_cast<int>(records.size());
  if (records.empty()) return agg;
  long ground = 0, plan = 0, with_poss = 0;
  long plan_len_sum = 0, expanded_sum = 0;
  double time_sum = 0.0, relax_sum = 0.0;
  long plan_successes = 0;
  for (const auto* r : records) {
    if (r->success_grounding) ++ground;
    if (r->success_planning) ++plan;
    // a task judged impossible counts as failed regardless of its outcome
    bool possibility_pass = !(r->possibility_verdict && !*r->possibility_verdict);
    if (r->success_grounding && possibility_pass) ++with_poss;
    if (r->success_planning) {
      ++plan_successes;
      plan_len_sum += r->plan_length;
      time_sum += r->planning_time_s;
      expanded_sum += r->expanded_nodes;
    }
    relax_sum += r->relaxations;
  }
  agg.sr_ground_plan = percent(ground, agg.tasks);
  agg.sr_plan_only = percent(plan, agg.tasks);
  agg.sr_with_possibility = percent(with_poss, agg.tasks);
  if (plan_successes > 0) {
    agg.avg_plan_length = static_cast<double>(plan_len_sum) / plan_successes;
    agg.avg_time_s = time_sum / plan_successes;
    agg.avg_expanded = static_cast<double>(expanded_sum) / plan_successes;
  }
  agg.avg_relaxations = relax_sum / agg.tasks;
  return agg;
}

}  // namespace metrics_detail

/// Mean refinements grouped by relaxation index, over the tasks that
/// reached that index.
inline std::vector<double> refinements_curve(const std::vector<TaskRecord>& records) {
  std::vector<double> sums;
  std::vector<int> counts;
  for (const auto& r : records) {
    for (size_t i = 0; i < r.refinements_per_relaxation.size(); ++i) {
      if (sums.size() <= i) {
        sums.resize(i + 1, 0.0);
        counts.resize(i + 1, 0);
      }
      sums[i] += r.refinements_per_relaxation[i];
      counts[i] += 1;
    }
  }
  std::vector<double> curve(sums.size());
  for (size_t i = 0; i < sums.size(); ++i) curve[i] = counts[i] ? sums[i] / counts[i] : 0.0;
  return curve;
}

/// Recomputes every aggregate from the records. Called both by the bench
/// runner and by consumers re-deriving numbers from a machine report.
inline BenchReport aggregate(std::vector<TaskRecord> records) {
  BenchReport report;
  std::sort(records.begin(), records.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.task_id < b.task_id; });
  report.records = std::move(records);

  std::vector<const TaskRecord*> all;
  std::map<std::string, std::vector<const TaskRecord*>> by_family;
  for (const auto& r : report.records) {
    all.push_back(&r);
    by_family[family_name(r.family)].push_back(&r);
  }
  report.global = metrics_detail::aggregate_records(all);
  for (const auto& [fam, recs] : by_family)
    report.per_family[fam] = metrics_detail::aggregate_records(recs);
  report.refinements_curve = refinements_curve(report.records);
  return report;
}

}  // namespace relaxplan
