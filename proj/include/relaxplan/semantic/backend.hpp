#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaxplan/checker.hpp"
#include "relaxplan/error.hpp"
#include "relaxplan/pddl/ast.hpp"
#include "relaxplan/scene_graph.hpp"

namespace relaxplan {

// Commonsense boundary of the system. Everything that needs world
// knowledge — producing a domain, formalizing a goal, repairing a
// problem from feedback, proposing substitute objects, relaxing a goal —
// goes through this interface. Two implementations: an HTTP language
// model client, and a deterministic table-driven backend for hermetic
// tests.

/// (relaxation index i, shift index k) of a goal along the exploration.
struct Lineage {
  int relaxation = 0;  // i
  int shift = 0;       // k

  bool operator==(const Lineage&) const = default;
};

struct GoalSpec {
  std::string text;
  std::optional<pddl::Formula> formula;  // set once the goal has been formalized
  Lineage lineage;
};

struct PossibilityVerdict {
  bool possible = false;
  std::string rationale;
};

class SemanticBackend {
 public:
  virtual ~SemanticBackend() = default;

  virtual std::string name() const = 0;

  virtual Result<pddl::DomainAst> gen_domain(const GoalSpec& goal, const DistilledScene& scene,
                                             const std::string& domain_desc) = 0;

  virtual Result<pddl::ProblemAst> gen_problem(const pddl::DomainAst& domain,
                                               const GoalSpec& goal,
                                               const DistilledScene& scene) = 0;

  virtual Result<pddl::ProblemAst> refine(const pddl::ProblemAst& problem,
                                          const pddl::DomainAst& domain, const GoalSpec& goal,
                                          const DistilledScene& scene,
                                          const std::vector<FeedbackItem>& feedback) = 0;

  virtual Result<GoalSpec> shift_goal(const GoalSpec& goal, const DistilledScene& scene) = 0;

  virtual Result<GoalSpec> relax_goal(const GoalSpec& goal, const DistilledScene& scene) = 0;

  virtual Result<PossibilityVerdict> possibility_check(const GoalSpec& goal,
                                                       const DistilledScene& scene) = 0;
};

}  // namespace relaxplan
