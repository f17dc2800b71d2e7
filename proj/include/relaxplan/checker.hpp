#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "relaxplan/pddl/ast.hpp"
#include "relaxplan/pddl/eval.hpp"
#include "relaxplan/pddl/printer.hpp"

namespace relaxplan {

// In-repo stand-in for the VAL toolchain roles: instantiate_check covers
// static coherence (the Instantiate role), validate_plan replays a plan
// against the STRIPS semantics (the Validate role). Findings become
// FeedbackItems, the H_fb currency the refinement operator consumes.

enum class FeedbackSource { instantiate, validate, grounding };
enum class Severity { error, warning };

using Locus = std::variant<std::monostate, int, std::string>;  // step index | ast path

struct FeedbackItem {
  FeedbackSource source;
  Severity severity;
  std::string message;
  Locus locus;
};

struct ValidationReport {
  bool ok = true;
  std::vector<FeedbackItem> items;
  std::optional<std::vector<std::string>> final_state;  // sorted atom keys, present iff ok

  void add_error(FeedbackSource src, std::string msg, Locus locus = std::monostate{}) {
    items.push_back({src, Severity::error, std::move(msg), std::move(locus)});
    ok = false;
  }
  void add_warning(FeedbackSource src, std::string msg, Locus locus = std::monostate{}) {
    items.push_back({src, Severity::warning, std::move(msg), std::move(locus)});
  }
  size_t error_count() const {
    size_t n = 0;
    for (const auto& i : items)
      if (i.severity == Severity::error) ++n;
    return n;
  }
};

namespace checker_detail {

inline void check_formula(const pddl::DomainAst& domain, const pddl::Formula& f,
                          const std::string& path,
                          const std::vector<pddl::TypedVar>& bound_vars,
                          ValidationReport& report) {
  using pddl::Formula;
  switch (f.kind) {
    case Formula::Kind::literal: {
      const auto* decl = domain.find_predicate(f.lit.pred);
      if (!decl) {
        report.add_error(FeedbackSource::instantiate,
                         "undeclared predicate '" + f.lit.pred + "'", path);
        return;
      }
      if (decl->params.size() != f.lit.args.size())
        report.add_error(FeedbackSource::instantiate,
                         "arity mismatch for predicate '" + f.lit.pred + "': got " +
                             std::to_string(f.lit.args.size()) + ", want " +
                             std::to_string(decl->params.size()),
                         path);
      return;
    }
    case Formula::Kind::equality:
      return;
    case Formula::Kind::conj: {
      int idx = 0;
      for (const auto& c : f.children)
        check_formula(domain, c, path + "[" + std::to_string(idx++) + "]", bound_vars, report);
      return;
    }
    case Formula::Kind::forall: {
      if (!domain.type_declared(f.var.type))
        report.add_error(FeedbackSource::instantiate,
                         "type '" + f.var.type + "' undeclared", path);
      auto inner = bound_vars;
      inner.push_back(f.var);
      check_formula(domain, f.children[0], path + ".body", inner, report);
      return;
    }
  }
}

/// Type of a term in a goal/init context: declared object type, or the
/// binder's type for quantified variables.
inline std::optional<std::string> term_type(const pddl::ProblemAst& problem,
                                            const std::vector<pddl::TypedVar>& bound,
                                            const std::string& term) {
  if (pddl::is_variable(term)) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->name == term) return it->type;
    return std::nullopt;
  }
  if (const auto* obj = problem.find_object(term)) return obj->type;
  return std::nullopt;
}

inline void check_ground_usage(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                               const pddl::Literal& lit,
                               const std::vector<pddl::TypedVar>& bound,
                               const std::string& path, ValidationReport& report) {
  const auto* decl = domain.find_predicate(lit.pred);
  if (!decl || decl->params.size() != lit.args.size()) return;  // reported elsewhere
  for (size_t i = 0; i < lit.args.size(); ++i) {
    const std::string& arg = lit.args[i];
    auto type = term_type(problem, bound, arg);
    if (!type) {
      report.add_error(FeedbackSource::instantiate, "object '" + arg + "' undeclared", path);
      continue;
    }
    if (!domain.is_subtype(*type, decl->params[i].type))
      report.add_error(FeedbackSource::instantiate,
                       "type mismatch in " + pddl::detail::render_literal(lit) + ": '" + arg +
                           "' has type '" + *type + "', parameter wants '" +
                           decl->params[i].type + "'",
                       path);
  }
}

inline void walk_goal_literals(
    const pddl::Formula& f, std::vector<pddl::TypedVar>& bound,
    const std::function<void(const pddl::Literal&, const std::vector<pddl::TypedVar>&)>& fn) {
  using pddl::Formula;
  switch (f.kind) {
    case Formula::Kind::literal:
      fn(f.lit, bound);
      return;
    case Formula::Kind::conj:
      for (const auto& c : f.children) walk_goal_literals(c, bound, fn);
      return;
    case Formula::Kind::forall:
      bound.push_back(f.var);
      walk_goal_literals(f.children[0], bound, fn);
      bound.pop_back();
      return;
    case Formula::Kind::equality:
      return;
  }
}

}  // namespace checker_detail

/// Static coherence pass: declarations, arities, type closure, and
/// reachability of every goal predicate through some action effect.
inline ValidationReport instantiate_check(const pddl::DomainAst& domain,
                                          const pddl::ProblemAst& problem) {
  using pddl::Formula;
  ValidationReport report;

  // domain side
  std::set<std::string> names;
  for (const auto& p : domain.predicates)
    if (!names.insert(p.name).second)
      report.add_error(FeedbackSource::instantiate, "duplicate predicate '" + p.name + "'",
                       std::string("domain.predicates"));
  for (const auto& p : domain.predicates)
    for (const auto& v : p.params)
      if (!domain.type_declared(v.type))
        report.add_error(FeedbackSource::instantiate, "type '" + v.type + "' undeclared",
                         "domain.predicates." + p.name);
  names.clear();
  for (size_t ai = 0; ai < domain.actions.size(); ++ai) {
    const auto& act = domain.actions[ai];
    std::string apath = "domain.actions[" + std::to_string(ai) + "]";
    if (!names.insert(act.name).second)
      report.add_error(FeedbackSource::instantiate, "duplicate action '" + act.name + "'", apath);
    for (const auto& v : act.params)
      if (!domain.type_declared(v.type))
        report.add_error(FeedbackSource::instantiate,
                         "type '" + v.type + "' undeclared in action '" + act.name + "'", apath);
    checker_detail::check_formula(domain, act.precondition, apath + ".precondition", act.params,
                                  report);
    int ei = 0;
    for (const auto& eff : act.effect) {
      const auto* decl = domain.find_predicate(eff.pred);
      std::string epath = apath + ".effect[" + std::to_string(ei++) + "]";
      if (!decl)
        report.add_error(FeedbackSource::instantiate,
                         "undeclared predicate '" + eff.pred + "'", epath);
      else if (decl->params.size() != eff.args.size())
        report.add_error(FeedbackSource::instantiate,
                         "arity mismatch for predicate '" + eff.pred + "': got " +
                             std::to_string(eff.args.size()) + ", want " +
                             std::to_string(decl->params.size()),
                         epath);
    }
  }

  // problem side
  if (problem.domain_name != domain.name)
    report.add_error(FeedbackSource::instantiate,
                     "problem declares domain '" + problem.domain_name + "' but domain is '" +
                         domain.name + "'",
                     std::string("problem.domain"));
  std::set<std::string> objs;
  for (const auto& o : problem.objects) {
    if (!objs.insert(o.name).second)
      report.add_error(FeedbackSource::instantiate, "duplicate object '" + o.name + "'",
                       std::string("problem.objects"));
    if (!domain.type_declared(o.type))
      report.add_error(FeedbackSource::instantiate,
                       "object '" + o.name + "' has undeclared type '" + o.type + "'",
                       "problem.objects." + o.name);
  }
  std::vector<pddl::TypedVar> no_bound;
  for (size_t li = 0; li < problem.init.size(); ++li) {
    const auto& lit = problem.init[li];
    std::string path = "problem.init[" + std::to_string(li) + "]";
    const auto* decl = domain.find_predicate(lit.pred);
    if (!decl) {
      report.add_error(FeedbackSource::instantiate, "undeclared predicate '" + lit.pred + "'",
                       path);
      continue;
    }
    if (decl->params.size() != lit.args.size()) {
      report.add_error(FeedbackSource::instantiate,
                       "arity mismatch for predicate '" + lit.pred + "': got " +
                           std::to_string(lit.args.size()) + ", want " +
                           std::to_string(decl->params.size()),
                       path);
      continue;
    }
    checker_detail::check_ground_usage(domain, problem, lit, no_bound, path, report);
  }

  checker_detail::check_formula(domain, problem.goal, "problem.goal", {}, report);
  {
    std::vector<pddl::TypedVar> bound;
    checker_detail::walk_goal_literals(
        problem.goal, bound,
        [&](const pddl::Literal& lit, const std::vector<pddl::TypedVar>& env) {
          checker_detail::check_ground_usage(domain, problem, lit, env, "problem.goal", report);
        });
  }

  // reachability: each goal predicate needs an achieving effect unless the
  // required state already holds in init
  if (report.ok) {
    pddl::GroundState init = pddl::initial_state(problem);
    std::set<std::string> adders, deleters;
    for (const auto& act : domain.actions)
      for (const auto& eff : act.effect) (eff.positive ? adders : deleters).insert(eff.pred);
    pddl::Binding env;
    auto ground = pddl::expand_to_ground(problem.goal, domain, problem, env);
    if (!ground.ok()) {
      report.add_error(FeedbackSource::instantiate, ground.error().message,
                       std::string("problem.goal"));
    } else {
      std::set<std::string> flagged;
      for (const auto& gl : ground.value()) {
        std::string pred = gl.key.substr(0, gl.key.find(' '));
        if (gl.positive && !adders.count(pred) && !init.count(gl.key) &&
            flagged.insert(pred).second)
          report.add_error(FeedbackSource::instantiate,
                           "goal predicate '" + pred + "' unreachable: no action adds it",
                           std::string("problem.goal"));
        if (!gl.positive && !deleters.count(pred) && init.count(gl.key) &&
            flagged.insert("!" + pred).second)
          report.add_error(FeedbackSource::instantiate,
                           "goal predicate '" + pred + "' unreachable: no action deletes it",
                           std::string("problem.goal"));
      }
    }
  }

  for (const auto& p : domain.predicates) {
    bool used = false;
    for (const auto& act : domain.actions) {
      std::vector<const pddl::Formula*> stack{&act.precondition};
      while (!stack.empty() && !used) {
        const auto* f = stack.back();
        stack.pop_back();
        if (f->kind == Formula::Kind::literal && f->lit.pred == p.name) used = true;
        for (const auto& c : f->children) stack.push_back(&c);
      }
      for (const auto& eff : act.effect)
        if (eff.pred == p.name) used = true;
      if (used) break;
    }
    if (!used)
      report.add_warning(FeedbackSource::instantiate,
                         "predicate '" + p.name + "' is never used by any action",
                         "domain.predicates." + p.name);
  }

  if (report.ok) {
    auto state = pddl::initial_state(problem);
    std::vector<std::string> sorted(state.begin(), state.end());
    std::sort(sorted.begin(), sorted.end());
    report.final_state = std::move(sorted);
  }
  return report;
}

/// Replays the plan from the initial state: precondition satisfaction at
/// every step, delete-then-add effects, goal check at the end. Findings
/// name the step, the action, and the violated condition.
inline ValidationReport validate_plan(const pddl::DomainAst& domain,
                                      const pddl::ProblemAst& problem, const pddl::Plan& plan) {
  ValidationReport report;
  pddl::GroundState state = pddl::initial_state(problem);

  for (size_t t = 0; t < plan.steps.size(); ++t) {
    const auto& step = plan.steps[t];
    std::string label = "step " + std::to_string(t + 1) + " " + step.to_string();
    const auto* schema = domain.find_action(step.name);
    if (!schema) {
      report.add_error(FeedbackSource::validate, label + ": unknown action '" + step.name + "'",
                       static_cast<int>(t));
      return report;
    }
    if (schema->params.size() != step.args.size()) {
      report.add_error(FeedbackSource::validate,
                       label + ": arity mismatch: got " + std::to_string(step.args.size()) +
                           ", want " + std::to_string(schema->params.size()),
                       static_cast<int>(t));
      return report;
    }
    pddl::Binding env;
    bool bad_args = false;
    for (size_t i = 0; i < step.args.size(); ++i) {
      const auto* obj = problem.find_object(step.args[i]);
      if (!obj) {
        report.add_error(FeedbackSource::validate,
                         label + ": argument '" + step.args[i] + "' is not a declared object",
                         static_cast<int>(t));
        bad_args = true;
        continue;
      }
      if (!domain.is_subtype(obj->type, schema->params[i].type)) {
        report.add_error(FeedbackSource::validate,
                         label + ": argument '" + step.args[i] + "' has type '" + obj->type +
                             "', parameter '" + schema->params[i].name + "' wants '" +
                             schema->params[i].type + "'",
                         static_cast<int>(t));
        bad_args = true;
      }
      env[schema->params[i].name] = step.args[i];
    }
    if (bad_args) return report;

    std::string witness;
    if (!pddl::eval_formula(schema->precondition, state, domain, problem, env, &witness)) {
      report.add_error(FeedbackSource::validate,
                       label + ": precondition " + witness + " unsatisfied",
                       static_cast<int>(t));
      return report;
    }
    // delete-then-add
    for (const auto& eff : schema->effect)
      if (!eff.positive) state.erase(pddl::atom_key(eff.pred, pddl::substitute_args(eff.args, env)));
    for (const auto& eff : schema->effect)
      if (eff.positive) state.insert(pddl::atom_key(eff.pred, pddl::substitute_args(eff.args, env)));
  }

  pddl::Binding env;
  std::string witness;
  if (!pddl::eval_formula(problem.goal, state, domain, problem, env, &witness)) {
    report.add_error(FeedbackSource::validate, "goal not satisfied: " + witness +
                         " does not hold in the final state",
                     std::string("problem.goal"));
    return report;
  }
  std::vector<std::string> sorted(state.begin(), state.end());
  std::sort(sorted.begin(), sorted.end());
  report.final_state = std::move(sorted);
  return report;
}

inline const char* feedback_source_name(FeedbackSource s) {
  switch (s) {
    case FeedbackSource::instantiate: return "instantiate";
    case FeedbackSource::validate: return "validate";
    case FeedbackSource::grounding: return "grounding";
  }
  return "?";
}

/// Line-per-item natural-language rendering, errors before warnings,
/// insertion order otherwise. This text is what refinement prompts see.
inline std::string render_feedback(const ValidationReport& report) {
  if (report.ok && report.items.empty()) return "validation passed";
  std::string out;
  for (Severity want : {Severity::error, Severity::warning}) {
    for (const auto& item : report.items) {
      if (item.severity != want) continue;
      out += "[";
      out += feedback_source_name(item.source);
      out += want == Severity::error ? "] error: " : "] warning: ";
      out += item.message;
      out += "\n";
    }
  }
  if (report.ok) out = "validation passed\n" + out;
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

inline std::string render_feedback(const std::vector<FeedbackItem>& items) {
  ValidationReport tmp;
  tmp.items = items;
  for (const auto& i : items)
    if (i.severity == Severity::error) tmp.ok = false;
  return render_feedback(tmp);
}

}  // namespace relaxplan
