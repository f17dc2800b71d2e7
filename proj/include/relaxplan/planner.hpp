#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "relaxplan/error.hpp"
#include "relaxplan/pddl/ast.hpp"
#include "relaxplan/pddl/eval.hpp"

namespace relaxplan {

// Grounded forward state-space search. Two modes: breadth-first (the
// shortest-plan oracle) and greedy best-first on the additive
// delete-relaxation heuristic (the default). Unit action costs.

struct FactBits {
  std::vector<uint64_t> words;

  explicit FactBits(size_t nbits = 0) : words((nbits + 63) / 64, 0) {}
  bool test(int i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { words[i >> 6] |= uint64_t{1} << (i & 63); }
  void reset(int i) { words[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  bool operator==(const FactBits&) const = default;
};

struct FactBitsHash {
  size_t operator()(const FactBits& s) const {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t w : s.words) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct GroundOp {
  std::string name;
  std::vector<std::string> args;
  std::vector<int> pre_pos;
  std::vector<int> pre_neg;
  std::vector<int> add;
  std::vector<int> del;
};

struct GroundTask {
  std::vector<std::string> fact_names;          // index -> "pred a b"
  std::vector<GroundOp> actions;
  FactBits init;
  std::vector<int> goal_pos;
  std::vector<int> goal_neg;
  std::vector<std::vector<int>> achievers_by_pre;  // fact -> actions with it as pos precondition

  bool goal_satisfied(const FactBits& s) const {
    for (int f : goal_pos)
      if (!s.test(f)) return false;
    for (int f : goal_neg)
      if (s.test(f)) return false;
    return true;
  }
  bool applicable(const GroundOp& op, const FactBits& s) const {
    for (int f : op.pre_pos)
      if (!s.test(f)) return false;
    for (int f : op.pre_neg)
      if (s.test(f)) return false;
    return true;
  }
  FactBits apply(const GroundOp& op, const FactBits& s) const {
    FactBits next = s;
    for (int f : op.del) next.reset(f);
    for (int f : op.add) next.set(f);
    return next;
  }
};

struct SearchStats {
  long expanded_nodes = 0;
  long generated_nodes = 0;
  long plan_length = 0;
  double wall_time = 0.0;
};

struct SearchLimits {
  long max_expanded = -1;   // unlimited when negative
  double max_seconds = -1;
};

enum class SearchMode { bfs, gbfs_hadd };

struct PlanResult {
  enum class Outcome { solved, unsolvable, resource_limit };
  Outcome outcome = Outcome::unsolvable;
  std::optional<pddl::Plan> plan;
  SearchStats stats;

  bool solved() const { return outcome == Outcome::solved; }
};

namespace planner_detail {

struct FactIndex {
  std::unordered_map<std::string, int> by_key;
  std::vector<std::string> names;

  int intern(const std::string& key) {
    auto [it, added] = by_key.try_emplace(key, static_cast<int>(names.size()));
    if (added) names.push_back(key);
    return it->second;
  }
};

/// Expands a (possibly quantified) precondition under a fixed binding
/// into positive/negative fact-index lists. Returns false when a static
/// equality makes the binding inapplicable.
inline bool flatten_precondition(const pddl::Formula& f, const pddl::DomainAst& domain,
                                 const pddl::ProblemAst& problem, pddl::Binding& env,
                                 FactIndex& facts, std::vector<int>& pos, std::vector<int>& neg) {
  using pddl::Formula;
  switch (f.kind) {
    case Formula::Kind::literal: {
      int idx = facts.intern(
          pddl::atom_key(f.lit.pred, pddl::substitute_args(f.lit.args, env)));
      (f.lit.positive ? pos : neg).push_back(idx);
      return true;
    }
    case Formula::Kind::equality: {
      bool eq = pddl::substitute(f.eq_lhs, env) == pddl::substitute(f.eq_rhs, env);
      return eq == f.eq_positive;
    }
    case Formula::Kind::conj:
      for (const auto& c : f.children)
        if (!flatten_precondition(c, domain, problem, env, facts, pos, neg)) return false;
      return true;
    case Formula::Kind::forall: {
      for (const auto& obj : pddl::objects_of_type(domain, problem, f.var.type)) {
        auto it = env.find(f.var.name);
        std::string prev = it == env.end() ? "" : it->second;
        bool had = it != env.end();
        env[f.var.name] = obj;
        bool ok = flatten_precondition(f.children[0], domain, problem, env, facts, pos, neg);
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

}  // namespace planner_detail

/// Instantiates every type-consistent binding of every action schema.
/// Universally quantified goals expand to ground conjunctions.
inline Result<GroundTask> ground(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                                 long max_ground_actions = 5'000'000) {
  planner_detail::FactIndex facts;
  GroundTask task;

  for (const auto& lit : problem.init) facts.intern(pddl::atom_key(lit.pred, lit.args));

  long count = 0;
  for (const auto& schema : domain.actions) {
    std::vector<std::vector<std::string>> candidates;
    candidates.reserve(schema.params.size());
    for (const auto& p : schema.params)
      candidates.push_back(pddl::objects_of_type(domain, problem, p.type));
    std::vector<size_t> cursor(schema.params.size(), 0);
    bool empty_domain = false;
    for (const auto& c : candidates)
      if (c.empty()) empty_domain = true;
    if (empty_domain && !schema.params.empty()) continue;

    for (;;) {
      pddl::Binding env;
      for (size_t i = 0; i < schema.params.size(); ++i)
        env[schema.params[i].name] = candidates[i][cursor[i]];

      GroundOp op;
      op.name = schema.name;
      for (size_t i = 0; i < schema.params.size(); ++i) op.args.push_back(env[schema.params[i].name]);
      if (planner_detail::flatten_precondition(schema.precondition, domain, problem, env, facts,
                                               op.pre_pos, op.pre_neg)) {
        for (const auto& eff : schema.effect) {
          int idx = facts.intern(pddl::atom_key(eff.pred, pddl::substitute_args(eff.args, env)));
          (eff.positive ? op.add : op.del).push_back(idx);
        }
        // repeated conditions (literal duplication, overlapping forall
        // expansions) must collapse or the h_add counters undercount
        for (auto* list : {&op.pre_pos, &op.pre_neg, &op.add, &op.del}) {
          std::sort(list->begin(), list->end());
          list->erase(std::unique(list->begin(), list->end()), list->end());
        }
        task.actions.push_back(std::move(op));
        if (++count > max_ground_actions)
          return Error{ErrCode::grounding_explosion,
                       "ground action count exceeds cap of " +
                           std::to_string(max_ground_actions)};
      }

      // advance the odometer
      size_t d = 0;
      if (schema.params.empty()) break;
      while (d < cursor.size()) {
        if (++cursor[d] < candidates[d].size()) break;
        cursor[d] = 0;
        ++d;
      }
      if (d == cursor.size()) break;
    }
  }

  pddl::Binding env;
  auto goal = pddl::expand_to_ground(problem.goal, domain, problem, env);
  if (!goal.ok()) return goal.error();
  for (const auto& gl : goal.value())
    (gl.positive ? task.goal_pos : task.goal_neg).push_back(facts.intern(gl.key));

  task.fact_names = facts.names;
  task.init = FactBits(task.fact_names.size());
  for (const auto& lit : problem.init)
    task.init.set(facts.by_key.at(pddl::atom_key(lit.pred, lit.args)));

  task.achievers_by_pre.assign(task.fact_names.size(), {});
  for (size_t a = 0; a < task.actions.size(); ++a)
    for (int f : task.actions[a].pre_pos)
      task.achievers_by_pre[f].push_back(static_cast<int>(a));
  return task;
}

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Additive delete-relaxation estimate. Negative conditions are treated
/// as free, so an infinite value proves the goal unreachable in the
/// original task as well.
inline double h_add(const GroundTask& task, const FactBits& state) {
  const size_t nf = task.fact_names.size();
  std::vector<double> cost(nf, kInfiniteCost);
  std::vector<int> remaining(task.actions.size());
  std::vector<double> acc(task.actions.size(), 0.0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;

  auto reach = [&](int f, double c) {
    if (c < cost[f]) {
      cost[f] = c;
      pq.emplace(c, f);
    }
  };
  for (size_t i = 0; i < nf; ++i)
    if (state.test(static_cast<int>(i))) reach(static_cast<int>(i), 0.0);
  for (size_t a = 0; a < task.actions.size(); ++a) {
    remaining[a] = static_cast<int>(task.actions[a].pre_pos.size());
    if (remaining[a] == 0)
      for (int g : task.actions[a].add) reach(g, 1.0);
  }
  while (!pq.empty()) {
    auto [c, f] = pq.top();
    pq.pop();
    if (c > cost[f]) continue;  // stale entry
    for (int a : task.achievers_by_pre[f]) {
      acc[a] += c;
      if (--remaining[a] == 0) {
        double ca = acc[a] + 1.0;
        for (int g : task.actions[a].add) reach(g, ca);
      }
    }
  }
  double total = 0.0;
  for (int g : task.goal_pos) {
    if (cost[g] == kInfiniteCost) return kInfiniteCost;
    total += cost[g];
  }
  return total;
}

inline PlanResult search(const GroundTask& task, SearchMode mode, SearchLimits limits = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  PlanResult result;
  struct Node {
    FactBits state;
    int parent;
    int action;
  };
  std::vector<Node> arena;
  std::unordered_map<FactBits, int, FactBitsHash> seen;

  auto extract_plan = [&](int idx) {
    pddl::Plan plan;
    std::vector<int> chain;
    for (int cur = idx; cur > 0; cur = arena[cur].parent) chain.push_back(arena[cur].action);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const GroundOp& op = task.actions[*it];
      plan.steps.push_back({op.name, op.args});
    }
    return plan;
  };

  auto finish = [&](PlanResult::Outcome outcome, std::optional<pddl::Plan> plan) {
    result.outcome = outcome;
    result.plan = std::move(plan);
    result.stats.plan_length = result.plan ? static_cast<long>(result.plan->steps.size()) : 0;
    result.stats.wall_time = elapsed();
    return result;
  };

  arena.push_back({task.init, -1, -1});
  seen.emplace(task.init, 0);
  result.stats.generated_nodes = 1;

  // tie-breaking is FIFO in both modes: strictly increasing tick
  using OpenEntry = std::pair<std::pair<double, long>, int>;  // ((h, tick), node)
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open_gbfs;
  std::deque<int> open_bfs;
  long tick = 0;

  if (mode == SearchMode::gbfs_hadd) {
    double h0 = h_add(task, task.init);
    if (h0 == kInfiniteCost) return finish(PlanResult::Outcome::unsolvable, std::nullopt);
    open_gbfs.emplace(std::make_pair(h0, tick++), 0);
  } else {
    open_bfs.push_back(0);
  }

  while (mode == SearchMode::bfs ? !open_bfs.empty() : !open_gbfs.empty()) {
    int idx;
    if (mode == SearchMode::bfs) {
      idx = open_bfs.front();
      open_bfs.pop_front();
    } else {
      idx = open_gbfs.top().second;
      open_gbfs.pop();
    }
    ++result.stats.expanded_nodes;

    if (task.goal_satisfied(arena[idx].state))
      return finish(PlanResult::Outcome::solved, extract_plan(idx));
    if (limits.max_expanded >= 0 && result.stats.expanded_nodes >= limits.max_expanded)
      return finish(PlanResult::Outcome::resource_limit, std::nullopt);
    if (limits.max_seconds >= 0 && elapsed() > limits.max_seconds)
      return finish(PlanResult::Outcome::resource_limit, std::nullopt);

    const FactBits state = arena[idx].state;
    for (size_t a = 0; a < task.actions.size(); ++a) {
      const GroundOp& op = task.actions[a];
      if (!task.applicable(op, state)) continue;
      FactBits next = task.apply(op, state);
      if (seen.count(next)) continue;
      int nidx = static_cast<int>(arena.size());
      arena.push_back({next, idx, static_cast<int>(a)});
      seen.emplace(arena.back().state, nidx);
      ++result.stats.generated_nodes;
      if (mode == SearchMode::bfs) {
        open_bfs.push_back(nidx);
      } else {
        double h = h_add(task, arena[nidx].state);
        if (h == kInfiniteCost) continue;  // provably dead end
        open_gbfs.emplace(std::make_pair(h, tick++), nidx);
      }
    }
  }
  return finish(PlanResult::Outcome::unsolvable, std::nullopt);
}

}  // namespace relaxplan
