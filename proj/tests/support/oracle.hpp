#pragma once

// Brute-force state-replay oracle, written against the AST types only.
// It shares no evaluation or search code with the library: states are
// plain sets of atom strings, applicability and effects are recomputed
// from scratch, and shortest plans come from an exhaustive layered BFS
// over the full reachable state space.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relaxplan/pddl/ast.hpp"

namespace oracle {

using relaxplan::pddl::ActionSchema;
using relaxplan::pddl::DomainAst;
using relaxplan::pddl::Formula;
using relaxplan::pddl::GroundAction;
using relaxplan::pddl::Plan;
using relaxplan::pddl::ProblemAst;

using State = std::set<std::string>;
using Env = std::map<std::string, std::string>;

inline std::string atom(const std::string& pred, const std::vector<std::string>& args,
                        const Env& env) {
  std::string key = pred;
  for (const auto& a : args) {
    key += ' ';
    auto it = env.find(a);
    key += it == env.end() ? a : it->second;
  }
  return key;
}

inline bool type_ok(const DomainAst& dom, const std::string& t, const std::string& want) {
  if (want == "object" || t == want) return true;
  std::string cur = t;
  for (int i = 0; i < 32; ++i) {
    bool found = false;
    for (const auto& d : dom.types) {
      if (d.name == cur) {
        if (d.parent == want) return true;
        cur = d.parent;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return false;
}

inline std::vector<std::string> objects_of(const DomainAst& dom, const ProblemAst& prob,
                                           const std::string& type) {
  std::vector<std::string> out;
  for (const auto& o : prob.objects)
    if (type_ok(dom, o.type, type)) out.push_back(o.name);
  return out;
}

inline bool holds(const Formula& f, const State& s, const DomainAst& dom, const ProblemAst& prob,
                  Env env) {
  switch (f.kind) {
    case Formula::Kind::literal:
      return (s.count(atom(f.lit.pred, f.lit.args, env)) > 0) == f.lit.positive;
    case Formula::Kind::equality: {
      auto resolve = [&](const std::string& t) {
        auto it = env.find(t);
        return it == env.end() ? t : it->second;
      };
      return (resolve(f.eq_lhs) == resolve(f.eq_rhs)) == f.eq_positive;
    }
    case Formula::Kind::conj:
      for (const auto& c : f.children)
        if (!holds(c, s, dom, prob, env)) return false;
      return true;
    case Formula::Kind::forall:
      for (const auto& obj : objects_of(dom, prob, f.var.type)) {
        env[f.var.name] = obj;
        if (!holds(f.children[0], s, dom, prob, env)) return false;
      }
      return true;
  }
  return false;
}

struct AppliedAction {
  const ActionSchema* schema;
  std::vector<std::string> args;
};

inline bool args_type_ok(const DomainAst& dom, const ProblemAst& prob, const ActionSchema& schema,
                         const std::vector<std::string>& args) {
  if (schema.params.size() != args.size()) return false;
  for (size_t i = 0; i < args.size(); ++i) {
    const auto* obj = prob.find_object(args[i]);
    if (!obj || !type_ok(dom, obj->type, schema.params[i].type)) return false;
  }
  return true;
}

inline bool applicable(const DomainAst& dom, const ProblemAst& prob, const ActionSchema& schema,
                       const std::vector<std::string>& args, const State& s) {
  if (!args_type_ok(dom, prob, schema, args)) return false;
  Env env;
  for (size_t i = 0; i < args.size(); ++i) env[schema.params[i].name] = args[i];
  return holds(schema.precondition, s, dom, prob, env);
}

inline State apply(const ActionSchema& schema, const std::vector<std::string>& args, State s) {
  Env env;
  for (size_t i = 0; i < args.size(); ++i) env[schema.params[i].name] = args[i];
  // delete first, then add
  for (const auto& eff : schema.effect)
    if (!eff.positive) s.erase(atom(eff.pred, eff.args, env));
  for (const auto& eff : schema.effect)
    if (eff.positive) s.insert(atom(eff.pred, eff.args, env));
  return s;
}

inline State initial(const ProblemAst& prob) {
  State s;
  for (const auto& l : prob.init) s.insert(atom(l.pred, l.args, {}));
  return s;
}

/// Full plan replay; verdict only.
inline bool validates(const DomainAst& dom, const ProblemAst& prob, const Plan& plan) {
  State s = initial(prob);
  for (const auto& step : plan.steps) {
    const ActionSchema* schema = dom.find_action(step.name);
    if (!schema) return false;
    for (const auto& a : step.args)
      if (!prob.find_object(a)) return false;
    if (!applicable(dom, prob, *schema, step.args, s)) return false;
    s = apply(*schema, step.args, s);
  }
  return holds(prob.goal, s, dom, prob, {});
}

inline std::vector<AppliedAction> applicable_actions(const DomainAst& dom,
                                                     const ProblemAst& prob, const State& s) {
  std::vector<AppliedAction> out;
  for (const auto& schema : dom.actions) {
    std::vector<std::vector<std::string>> cands;
    for (const auto& p : schema.params) cands.push_back(objects_of(dom, prob, p.type));
    bool any_empty = false;
    for (const auto& c : cands) any_empty |= c.empty();
    if (any_empty && !schema.params.empty()) continue;
    std::vector<size_t> cursor(schema.params.size(), 0);
    for (;;) {
      std::vector<std::string> args;
      for (size_t i = 0; i < cursor.size(); ++i) args.push_back(cands[i][cursor[i]]);
      if (applicable(dom, prob, schema, args, s)) out.push_back({&schema, args});
      if (schema.params.empty()) break;
      size_t d = 0;
      while (d < cursor.size()) {
        if (++cursor[d] < cands[d].size()) break;
        cursor[d] = 0;
        ++d;
      }
      if (d == cursor.size()) break;
    }
  }
  return out;
}

struct BfsAnswer {
  bool decided = false;   // false when the state cap was hit
  bool solvable = false;
  int shortest = -1;      // plan length when solvable
  long states = 0;
};

/// Exhaustive layered BFS over the reachable state space.
inline BfsAnswer shortest_plan_length(const DomainAst& dom, const ProblemAst& prob,
                                      long max_states = 200000) {
  BfsAnswer ans;
  State init = initial(prob);
  std::set<State> seen{init};
  std::deque<std::pair<State, int>> queue{{init, 0}};
  while (!queue.empty()) {
    auto [s, depth] = queue.front();
    queue.pop_front();
    ++ans.states;
    if (holds(prob.goal, s, dom, prob, {})) {
      ans.decided = true;
      ans.solvable = true;
      ans.shortest = depth;
      return ans;
    }
    if (ans.states > max_states) return ans;  // undecided
    for (const auto& act : applicable_actions(dom, prob, s)) {
      State next = apply(*act.schema, act.args, s);
      if (seen.insert(next).second) queue.emplace_back(std::move(next), depth + 1);
    }
  }
  ans.decided = true;
  ans.solvable = false;
  return ans;
}

}  // namespace oracle
