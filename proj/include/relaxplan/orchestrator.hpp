#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaxplan/checker.hpp"
#include "relaxplan/grounding.hpp"
#include "relaxplan/planner.hpp"
#include "relaxplan/pddl/printer.hpp"
#include "relaxplan/semantic/backend.hpp"

namespace relaxplan {

// The solve loop. Outer iterations walk the diagonal of the relaxation
// grid: generate a problem for the current goal, plan, refine from
// validator feedback up to the inner budget, check plan grounding, and
// on failure shift then relax the goal. The domain is produced at most
// once per run; the problem is regenerated every outer iteration.

struct SolveConfig {
  int max_outer = 4;
  int max_inner = 4;
  SearchMode mode = SearchMode::gbfs_hadd;
  SearchLimits limits;
  long max_ground_actions = 5'000'000;
  bool possibility_check = false;
};

struct TraceEvent {
  std::string kind;  // "backend:gen_problem", "planner:search", "check:validate", ...
  bool ok = true;
  std::string detail;
};

struct TraceStep {
  int relaxation = 0;  // i
  int shift = 0;       // k
  int refinements = 0; // n consumed this iteration
  std::string goal_text;
  std::string problem_snapshot;           // artifact id of the final problem this iteration
  std::string plan_outcome;               // solved | unsolvable | resource_limit | ...
  bool plan_valid = false;                // Check(pi): a validated plan exists
  std::vector<FeedbackItem> feedback;     // H_fb at iteration end
  std::optional<bool> grounding_ok;
  std::vector<GroundingReport::Unmatched> unmatched;
  SearchStats search_stats;               // stats of the last planner call this iteration
  std::vector<TraceEvent> events;
};

struct RelaxationTrace {
  std::vector<TraceStep> steps;
  std::vector<TraceEvent> setup_events;  // domain generation, possibility check
  int semantic_distance = 0;   // k of the terminal step
  int total_relaxations = 0;   // i of the terminal step
  int total_refinements = 0;   // sum of n over all iterations
};

struct SolveResult {
  enum class Outcome { grounded, exhausted };

  Outcome outcome = Outcome::exhausted;
  std::optional<pddl::Plan> plan;
  std::optional<pddl::ProblemAst> problem;
  std::optional<pddl::DomainAst> domain;
  RelaxationTrace trace;
  SearchStats stats;  // search totals across every planner call
  std::optional<PossibilityVerdict> possibility;
  std::map<std::string, std::string> artifacts;  // snapshot id -> rendered text

  bool grounded() const { return outcome == Outcome::grounded; }
};

namespace orchestrator_detail {

inline std::string outcome_name(PlanResult::Outcome o) {
  switch (o) {
    case PlanResult::Outcome::solved: return "solved";
    case PlanResult::Outcome::unsolvable: return "unsolvable";
    case PlanResult::Outcome::resource_limit: return "resource_limit";
  }
  return "?";
}

}  // namespace orchestrator_detail

inline Result<SolveResult> solve(SemanticBackend& backend, const std::string& goal_text,
                                 const DistilledScene& scene, const std::string& domain_desc,
                                 const std::optional<pddl::DomainAst>& initial_domain,
                                 const SolveConfig& cfg) {
  if (cfg.max_outer < 1 || cfg.max_inner < 1)
    return Error{ErrCode::config, "iteration budgets must be at least 1"};
  if (scene.room_ids.empty())
    return Error{ErrCode::config, "scene has no rooms"};

  SolveResult result;
  GoalSpec goal{goal_text, std::nullopt, {0, 0}};

  if (cfg.possibility_check) {
    auto verdict = backend.possibility_check(goal, scene);
    result.trace.setup_events.push_back({"backend:possibility_check", verdict.ok(),
                                         verdict.ok() ? (verdict.value().possible ? "possible" : "impossible")
                                                      : verdict.error().describe()});
    if (verdict.ok()) result.possibility = verdict.value();
  }

  pddl::DomainAst domain;
  if (initial_domain) {
    domain = *initial_domain;
  } else {
    auto generated = backend.gen_domain(goal, scene, domain_desc);
    result.trace.setup_events.push_back({"backend:gen_domain", generated.ok(),
                                         generated.ok() ? "" : generated.error().describe()});
    if (!generated.ok()) {
      // nothing to plan with; report the exhausted run with the failure on record
      return result;
    }
    domain = std::move(generated).take();
  }
  result.domain = domain;
  result.artifacts["domain"] = pddl::render(domain);

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    TraceStep step;
    step.relaxation = goal.lineage.relaxation;
    step.shift = goal.lineage.shift;
    step.goal_text = goal.text;
    const std::string tag =
        "_i" + std::to_string(step.relaxation) + "_k" + std::to_string(step.shift);

    std::optional<pddl::ProblemAst> problem;
    {
      auto generated = backend.gen_problem(domain, goal, scene);
      step.events.push_back({"backend:gen_problem", generated.ok(),
                             generated.ok() ? "" : generated.error().describe()});
      if (generated.ok()) {
        problem = std::move(generated).take();
        goal.formula = problem->goal;
      } else {
        step.plan_outcome = "backend_error";
        step.feedback.push_back({FeedbackSource::instantiate, Severity::error,
                                 generated.error().describe(), std::monostate{}});
      }
    }

    std::optional<pddl::Plan> plan;
    bool plan_valid = false;
    int n = 0;
    if (problem) {
      result.artifacts["problem" + tag + "_n0"] = pddl::render(*problem);
      step.problem_snapshot = "problem" + tag + "_n0";
      for (;;) {
        std::vector<FeedbackItem> feedback;
        ValidationReport inst = instantiate_check(domain, *problem);
        step.events.push_back({"check:instantiate", inst.ok,
                               inst.ok ? "" : std::to_string(inst.error_count()) + " errors"});
        feedback = inst.items;
        plan.reset();
        if (inst.ok) {
          auto task = ground(domain, *problem, cfg.max_ground_actions);
          if (!task.ok()) {
            step.plan_outcome = "grounding_explosion";
            feedback.push_back({FeedbackSource::validate, Severity::error,
                                task.error().describe(), std::monostate{}});
            step.events.push_back({"planner:ground", false, task.error().describe()});
          } else {
            PlanResult pr = search(task.value(), cfg.mode, cfg.limits);
            step.events.push_back({"planner:search", pr.solved(),
                                   orchestrator_detail::outcome_name(pr.outcome)});
            step.plan_outcome = orchestrator_detail::outcome_name(pr.outcome);
            step.search_stats = pr.stats;
            result.stats.expanded_nodes += pr.stats.expanded_nodes;
            result.stats.generated_nodes += pr.stats.generated_nodes;
            result.stats.wall_time += pr.stats.wall_time;
            if (pr.solved()) {
              plan = pr.plan;
              ValidationReport vrep = validate_plan(domain, *problem, *plan);
              step.events.push_back({"check:validate", vrep.ok,
                                     vrep.ok ? "" : render_feedback(vrep)});
              if (vrep.ok) {
                plan_valid = true;
                feedback = vrep.items;  // warnings only
              } else {
                feedback.insert(feedback.end(), vrep.items.begin(), vrep.items.end());
              }
            } else {
              feedback.push_back({FeedbackSource::validate, Severity::error,
                                  "planner found no plan (" +
                                      orchestrator_detail::outcome_name(pr.outcome) + ")",
                                  std::monostate{}});
            }
          }
        } else {
          step.plan_outcome = "instantiate_failed";
        }

        step.feedback = feedback;
        if (plan_valid || n >= cfg.max_inner) break;

        auto refined = backend.refine(*problem, domain, goal, scene, feedback);
        step.events.push_back({"backend:refine", refined.ok(),
                               refined.ok() ? "" : refined.error().describe()});
        if (refined.ok()) {
          problem = std::move(refined).take();
          ++n;
          std::string snap = "problem" + tag + "_n" + std::to_string(n);
          result.artifacts[snap] = pddl::render(*problem);
          step.problem_snapshot = snap;
        } else if (refined.code() == ErrCode::no_progress) {
          break;  // a repeat round would see the same feedback again
        } else {
          ++n;  // a failed backend call still consumes an inner iteration
        }
      }
    }
    step.refinements = n;
    result.stats.plan_length = plan_valid ? static_cast<long>(plan->steps.size())
                                          : result.stats.plan_length;
    step.plan_valid = plan_valid;

    if (plan_valid) {
      result.artifacts["plan" + tag] = pddl::render(*plan);
      // Check(pi) runs once more after the inner loop; redundant under
      // Check := Validate.ok but kept so the trace mirrors the loop shape.
      ValidationReport recheck = validate_plan(domain, *problem, *plan);
      step.events.push_back({"check:validate_recheck", recheck.ok, ""});
      GroundingReport greport = check_ground(*plan, scene, domain);
      step.events.push_back({"check:ground", greport.ok,
                             greport.ok ? "" : std::to_string(greport.unmatched.size()) +
                                                   " unmatched symbols"});
      step.grounding_ok = greport.ok;
      step.unmatched = greport.unmatched;
      auto ground_feedback = validate_ground(*plan, scene, greport);
      step.feedback.insert(step.feedback.end(), ground_feedback.begin(), ground_feedback.end());
      if (greport.ok) {
        result.outcome = SolveResult::Outcome::grounded;
        result.plan = plan;
        result.problem = problem;
        result.trace.steps.push_back(std::move(step));
        break;
      }
    }
    result.trace.steps.push_back(std::move(step));
    if (outer + 1 == cfg.max_outer) break;  // budget spent: no further adaptation

    // goal shifting followed by goal relaxation; both advance lineage
    // even when the backend has nothing new to offer
    {
      auto shifted = backend.shift_goal(goal, scene);
      result.trace.steps.back().events.push_back(
          {"backend:shift_goal", shifted.ok(),
           shifted.ok() ? shifted.value().text : shifted.error().describe()});
      if (shifted.ok())
        goal = std::move(shifted).take();
      else
        goal.lineage.shift += 1;
      auto relaxed = backend.relax_goal(goal, scene);
      result.trace.steps.back().events.push_back(
          {"backend:relax_goal", relaxed.ok(),
           relaxed.ok() ? relaxed.value().text : relaxed.error().describe()});
      if (relaxed.ok())
        goal = std::move(relaxed).take();
      else
        goal.lineage.relaxation += 1;
    }
  }

  if (!result.trace.steps.empty()) {
    result.trace.semantic_distance = result.trace.steps.back().shift;
    result.trace.total_relaxations = result.trace.steps.back().relaxation;
    for (const auto& s : result.trace.steps) result.trace.total_refinements += s.refinements;
  }
  return result;
}

/// Standalone possibility check, recorded but never gating (the metric
/// that consumes it treats a negative verdict as an automatic failure).
inline Result<PossibilityVerdict> run_possibility_check(SemanticBackend& backend,
                                                        const std::string& goal_text,
                                                        const DistilledScene& scene) {
  GoalSpec goal{goal_text, std::nullopt, {0, 0}};
  return backend.possibility_check(goal, scene);
}

}  // namespace relaxplan
