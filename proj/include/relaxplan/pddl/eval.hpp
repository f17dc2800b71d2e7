#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "relaxplan/error.hpp"
#include "relaxplan/pddl/ast.hpp"

namespace relaxplan::pddl {

// Ground-state machinery shared by the validator and the planner: atoms
// are keyed "pred arg1 arg2", states are sets of atom keys.

using GroundState = std::unordered_set<std::string>;
using Binding = std::map<std::string, std::string>;  // ?var -> constant

inline std::string atom_key(const std::string& pred, const std::vector<std::string>& args) {
  std::string key = pred;
  for (const auto& a : args) {
    key += ' ';
    key += a;
  }
  return key;
}

inline std::string pretty_atom(const std::string& key) {
  std::string out = "(";
  out += key;
  out += ")";
  return out;
}

inline std::string substitute(const std::string& term, const Binding& env) {
  if (!is_variable(term)) return term;
  auto it = env.find(term);
  return it == env.end() ? term : it->second;
}

inline std::vector<std::string> substitute_args(const std::vector<std::string>& args,
                                                const Binding& env) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back(substitute(a, env));
  return out;
}

/// Objects whose declared type is (a subtype of) `type`, in declaration order.
inline std::vector<std::string> objects_of_type(const DomainAst& domain, const ProblemAst& problem,
                                                const std::string& type) {
  std::vector<std::string> out;
  for (const auto& o : problem.objects)
    if (domain.is_subtype(o.type, type)) out.push_back(o.name);
  return out;
}

/// Evaluates a formula against a ground state under `env`. Quantifiers
/// expand over the typed object universe. On failure, `witness` (when
/// given) receives the first unsatisfied ground condition, rendered.
inline bool eval_formula(const Formula& f, const GroundState& state, const DomainAst& domain,
                         const ProblemAst& problem, Binding& env, std::string* witness) {
  switch (f.kind) {
    case Formula::Kind::literal: {
      std::string key = atom_key(f.lit.pred, substitute_args(f.lit.args, env));
      bool holds = state.count(key) > 0;
      if (holds != f.lit.positive) {
        if (witness) *witness = f.lit.positive ? pretty_atom(key) : "(not " + pretty_atom(key) + ")";
        return false;
      }
      return true;
    }
    case Formula::Kind::equality: {
      bool eq = substitute(f.eq_lhs, env) == substitute(f.eq_rhs, env);
      if (eq != f.eq_positive) {
        if (witness)
          *witness = (f.eq_positive ? "(= " : "(not (= ") + substitute(f.eq_lhs, env) + " " +
                     substitute(f.eq_rhs, env) + (f.eq_positive ? ")" : "))");
        return false;
      }
      return true;
    }
    case Formula::Kind::conj:
      for (const auto& c : f.children)
        if (!eval_formula(c, state, domain, problem, env, witness)) return false;
      return true;
    case Formula::Kind::forall: {
      for (const auto& obj : objects_of_type(domain, problem, f.var.type)) {
        auto saved = env.find(f.var.name);
        std::string prev = saved == env.end() ? "" : saved->second;
        bool had = saved != env.end();
        env[f.var.name] = obj;
        bool ok = eval_formula(f.children[0], state, domain, problem, env, witness);
        if (had)
          env[f.var.name] = prev;
        else
          env.erase(f.var.name);
        if (!ok) return false;
      }
      return true;
    }
  }
  return false;
}

struct GroundLiteral {
  std::string key;
  bool positive;

  bool operator==(const GroundLiteral&) const = default;
};

/// Flattens a quantifier-free-after-expansion formula into ground
/// literals. Equality atoms are decided immediately; an unsatisfiable
/// equality reports failure through the error result.
inline Result<std::vector<GroundLiteral>> expand_to_ground(const Formula& f,
                                                           const DomainAst& domain,
                                                           const ProblemAst& problem,
                                                           Binding& env) {
  std::vector<GroundLiteral> out;
  std::function<Result<std::monostate>(const Formula&)> walk =
      [&](const Formula& node) -> Result<std::monostate> {
    switch (node.kind) {
      case Formula::Kind::literal:
        out.push_back({atom_key(node.lit.pred, substitute_args(node.lit.args, env)),
                       node.lit.positive});
        return std::monostate{};
      case Formula::Kind::equality: {
        bool eq = substitute(node.eq_lhs, env) == substitute(node.eq_rhs, env);
        if (eq != node.eq_positive)
          return make_error(ErrCode::syntax, "goal contains an unsatisfiable equality");
        return std::monostate{};
      }
      case Formula::Kind::conj:
        for (const auto& c : node.children) {
          auto r = walk(c);
          if (!r.ok()) return r.error();
        }
        return std::monostate{};
      case Formula::Kind::forall: {
        for (const auto& obj : objects_of_type(domain, problem, node.var.type)) {
          auto saved = env.find(node.var.name);
          std::string prev = saved == env.end() ? "" : saved->second;
          bool had = saved != env.end();
          env[node.var.name] = obj;
          auto r = walk(node.children[0]);
          if (had)
            env[node.var.name] = prev;
          else
            env.erase(node.var.name);
          if (!r.ok()) return r.error();
        }
        return std::monostate{};
      }
    }
    return std::monostate{};
  };
  auto r = walk(f);
  if (!r.ok()) return r.error();
  return out;
}

inline GroundState initial_state(const ProblemAst& problem) {
  GroundState s;
  for (const auto& l : problem.init) s.insert(atom_key(l.pred, l.args));
  return s;
}

}  // namespace relaxplan::pddl
