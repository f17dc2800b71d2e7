#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relaxplan/pddl/parser.hpp"
#include "relaxplan/pddl/printer.hpp"
#include "relaxplan/semantic/backend.hpp"
#include "relaxplan/semantic/rule_table.hpp"

namespace relaxplan {

// Deterministic table-driven stand-in for the language-model backend.
// Identical inputs produce byte-identical outputs, which is what lets
// the whole pipeline run hermetically in CI.
//
// Conventions shared with the bundled family domains: rooms are typed
// `room`, the agent constant `robot` is typed `agent`, object locations
// use `(at <obj> <room>)`, the agent location `(robot-at <room>)`, and
// an empty gripper `(hand-free)`.

class ScriptedBackend : public SemanticBackend {
 public:
  explicit ScriptedBackend(RuleTable table) : table_(std::move(table)) {}

  std::string name() const override { return "scripted:" + table_.family; }

  const RuleTable& table() const { return table_; }

  Result<pddl::DomainAst> gen_domain(const GoalSpec&, const DistilledScene&,
                                     const std::string&) override {
    if (table_.domain_text.empty())
      return Error{ErrCode::backend, "rule table for '" + table_.family + "' carries no domain"};
    return pddl::parse_domain(table_.domain_text);
  }

  Result<pddl::ProblemAst> gen_problem(const pddl::DomainAst& domain, const GoalSpec& goal,
                                       const DistilledScene& scene) override {
    auto match = match_goal(table_, goal.text);
    if (!match)
      return Error{ErrCode::backend,
                   "goal text not recognized by rule table: '" + goal.text + "'"};

    pddl::ProblemAst prob;
    prob.name = match->tpl->id + "_i" + std::to_string(goal.lineage.relaxation) + "_k" +
                std::to_string(goal.lineage.shift);
    prob.domain_name = domain.name;

    for (const auto& room : scene.room_ids) prob.objects.push_back({room, "room"});
    prob.objects.push_back({"robot", "agent"});
    for (const auto& e : scene.entries)
      prob.objects.push_back({e.object_id, table_.object_type(label_of_id(e.object_id))});

    if (scene.room_ids.empty())
      return Error{ErrCode::backend, "scene has no rooms"};
    const std::string& start_room = scene.room_ids.front();

    prob.init.push_back({"robot-at", {start_room}, true});
    prob.init.push_back({"hand-free", {}, true});
    for (const auto& e : scene.entries) prob.init.push_back({"at", {e.object_id, e.room_id}, true});

    if (table_.containment) add_containment_init(domain, scene, prob);

    // objects the goal requires but the scene lacks are fabricated, the
    // way a model hallucinates them; the grounding check catches these
    std::vector<std::string> fabricated;
    auto resolve = [&](const std::string& ref, const std::string& iter_value) -> std::string {
      if (starts_with(ref, "slot:")) return resolve_label(slot_label(*match, ref.substr(5)), scene, prob, fabricated);
      if (starts_with(ref, "label:")) return resolve_label(ref.substr(6), scene, prob, fabricated);
      if (starts_with(ref, "room:")) return ref.substr(5);
      if (ref == "$x" || ref == "$v") return iter_value;
      return ref;
    };

    std::vector<pddl::Formula> conjuncts;
    for (const auto& frag : match->tpl->fragments) {
      if (match->dropped.count(frag.id)) continue;
      for (const auto& spec : frag.conjuncts) {
        switch (spec.kind) {
          case ConjunctSpec::Kind::literal: {
            pddl::Literal lit;
            lit.pred = spec.literal.front();
            for (size_t i = 1; i < spec.literal.size(); ++i)
              lit.args.push_back(resolve(spec.literal[i], ""));
            lit.positive = spec.positive;
            conjuncts.push_back(pddl::Formula::make_literal(std::move(lit)));
            break;
          }
          case ConjunctSpec::Kind::each_label:
          case ConjunctSpec::Kind::each_type: {
            for (const auto& e : scene.entries) {
              std::string label = label_of_id(e.object_id);
              bool wanted = spec.kind == ConjunctSpec::Kind::each_label
                                ? label == spec.label
                                : table_.object_type(label) == spec.type;
              if (!wanted) continue;
              pddl::Literal lit;
              lit.pred = spec.literal.front();
              for (size_t i = 1; i < spec.literal.size(); ++i)
                lit.args.push_back(resolve(spec.literal[i], e.object_id));
              lit.positive = spec.positive;
              conjuncts.push_back(pddl::Formula::make_literal(std::move(lit)));
            }
            break;
          }
          case ConjunctSpec::Kind::forall: {
            pddl::Literal lit;
            lit.pred = spec.literal.front();
            for (size_t i = 1; i < spec.literal.size(); ++i)
              lit.args.push_back(resolve(spec.literal[i], "?v"));
            lit.positive = spec.positive;
            conjuncts.push_back(pddl::Formula::make_forall(
                {"?v", spec.var_type}, pddl::Formula::make_literal(std::move(lit))));
            break;
          }
        }
      }
    }
    prob.goal = pddl::Formula::make_conj(std::move(conjuncts));

    apply_faults(goal, scene, prob);
    return prob;
  }

  Result<pddl::ProblemAst> refine(const pddl::ProblemAst& problem, const pddl::DomainAst&,
                                  const GoalSpec&, const DistilledScene& scene,
                                  const std::vector<FeedbackItem>& feedback) override {
    const FeedbackItem* first_error = nullptr;
    for (const auto& item : feedback)
      if (item.severity == Severity::error) {
        first_error = &item;
        break;
      }
    if (!first_error)
      return Error{ErrCode::no_progress, "no actionable error in feedback"};

    pddl::ProblemAst revised = problem;
    const std::string& msg = first_error->message;

    if (auto pred = extract(msg, "undeclared predicate '", "'")) {
      erase_literals_with_pred(revised, *pred);
    } else if (auto obj = extract(msg, "object '", "' undeclared")) {
      add_missing_object(revised, *obj, scene);
    } else if (msg.find("arity mismatch for predicate '") != std::string::npos) {
      auto pred = extract(msg, "arity mismatch for predicate '", "'");
      auto want = extract(msg, "want ", "");
      if (pred && want) truncate_literal_args(revised, *pred, std::stoul(*want));
    } else if (auto sym = extract(msg, "symbol '", "' not found")) {
      auto cand = extract(msg, "candidates: ", ",");
      if (!cand) cand = extract(msg, "candidates: ", "");
      if (cand) replace_symbol(revised, *sym, trim(*cand));
    }

    if (pddl::render(revised) == pddl::render(problem))
      return Error{ErrCode::no_progress, "refinement produced no structural change"};
    return revised;
  }

  Result<GoalSpec> shift_goal(const GoalSpec& goal, const DistilledScene& scene) override {
    auto match = match_goal(table_, goal.text);
    if (!match)
      return Error{ErrCode::backend,
                   "goal text not recognized by rule table: '" + goal.text + "'"};
    GoalSpec shifted = goal;
    shifted.formula.reset();
    shifted.lineage.shift += 1;

    auto slots = rule_detail::referenced_slots(*match->tpl, match->dropped);
    bool any_unsatisfied = false;
    for (const auto& slot : slots) {
      const auto& cands = table_.slots.at(slot);
      int rank = match->slot_rank.at(slot);
      if (label_present(cands[rank], scene)) continue;
      any_unsatisfied = true;
      if (rank + 1 < static_cast<int>(cands.size())) {
        auto ranks = match->slot_rank;
        ranks[slot] = rank + 1;  // next untried candidate
        shifted.text = render_goal_text(table_, *match->tpl, ranks, match->dropped);
        return shifted;
      }
    }
    if (!any_unsatisfied) return shifted;  // textually stable, lineage still advances
    return Error{ErrCode::no_alternative, "all substitution candidates exhausted"};
  }

  Result<GoalSpec> relax_goal(const GoalSpec& goal, const DistilledScene& scene) override {
    auto match = match_goal(table_, goal.text);
    if (!match)
      return Error{ErrCode::backend,
                   "goal text not recognized by rule table: '" + goal.text + "'"};
    GoalSpec relaxed = goal;
    relaxed.formula.reset();
    relaxed.lineage.relaxation += 1;

    std::vector<std::string> stuck;
    for (const auto& frag : match->tpl->fragments) {
      if (match->dropped.count(frag.id)) continue;
      if (fragment_stuck(frag, *match, scene)) stuck.push_back(frag.id);
    }
    if (stuck.empty()) return relaxed;  // already feasible: retain the formulation

    for (const auto& id : match->tpl->relax_order) {
      if (match->dropped.count(id)) continue;
      if (std::find(stuck.begin(), stuck.end(), id) == stuck.end()) continue;
      auto dropped = match->dropped;
      dropped.insert(id);
      relaxed.text = render_goal_text(table_, *match->tpl, match->slot_rank, dropped);
      return relaxed;
    }
    return Error{ErrCode::nothing_to_relax, "no droppable conjunct can unblock the goal"};
  }

  Result<PossibilityVerdict> possibility_check(const GoalSpec& goal,
                                               const DistilledScene& scene) override {
    auto match = match_goal(table_, goal.text);
    if (!match)
      return Error{ErrCode::backend,
                   "goal text not recognized by rule table: '" + goal.text + "'"};
    std::vector<std::string> missing;
    for (const auto& frag : match->tpl->fragments) {
      if (match->dropped.count(frag.id)) continue;
      for (const auto& spec : frag.conjuncts) {
        for (size_t i = 1; i < spec.literal.size(); ++i) {
          const std::string& ref = spec.literal[i];
          if (starts_with(ref, "slot:")) {
            const auto& cands = table_.slots.at(ref.substr(5));
            bool any = false;
            for (const auto& c : cands) any |= label_present(c, scene);
            if (!any) missing.push_back(ref.substr(5) + " (no candidate present)");
          } else if (starts_with(ref, "label:")) {
            if (!label_present(ref.substr(6), scene)) missing.push_back(ref.substr(6));
          } else if (starts_with(ref, "room:")) {
            if (!scene.has_room(ref.substr(5))) missing.push_back("room " + ref.substr(5));
          }
        }
      }
    }
    PossibilityVerdict verdict;
    verdict.possible = missing.empty();
    verdict.rationale = missing.empty()
                            ? "all required objects are present or substitutable"
                            : "missing from scene: " + join(missing, ", ");
    return verdict;
  }

 private:
  static std::optional<std::string> extract(const std::string& text, const std::string& before,
                                            const std::string& after) {
    size_t b = text.find(before);
    if (b == std::string::npos) return std::nullopt;
    b += before.size();
    size_t e = after.empty() ? text.size() : text.find(after, b);
    if (e == std::string::npos) return std::nullopt;
    return text.substr(b, e - b);
  }

  std::string slot_label(const GoalMatch& match, const std::string& slot) const {
    const auto& cands = table_.slots.at(slot);
    int rank = match.slot_rank.count(slot) ? match.slot_rank.at(slot) : 0;
    return cands[std::min<size_t>(rank, cands.size() - 1)];
  }

  static bool label_present(const std::string& label, const DistilledScene& scene) {
    for (const auto& e : scene.entries)
      if (label_of_id(e.object_id) == label) return true;
    return false;
  }

  static std::optional<std::string> find_object_id(const std::string& label,
                                                   const DistilledScene& scene) {
    for (const auto& e : scene.entries)  // entries sorted by id: first hit is lowest
      if (label_of_id(e.object_id) == label) return e.object_id;
    return std::nullopt;
  }

  /// Scene object id for a label, or a fabricated "<label>_1" declared
  /// and placed in the first room.
  std::string resolve_label(const std::string& label, const DistilledScene& scene,
                            pddl::ProblemAst& prob, std::vector<std::string>& fabricated) const {
    if (auto id = find_object_id(label, scene)) return *id;
    std::string fake = label + "_1";
    if (std::find(fabricated.begin(), fabricated.end(), fake) == fabricated.end()) {
      fabricated.push_back(fake);
      prob.objects.push_back({fake, table_.object_type(label)});
      prob.init.push_back({"at", {fake, scene.room_ids.front()}, true});
    }
    return fake;
  }

  bool fragment_stuck(const FragmentSpec& frag, const GoalMatch& match,
                      const DistilledScene& scene) const {
    for (const auto& spec : frag.conjuncts) {
      for (size_t i = 1; i < spec.literal.size(); ++i) {
        const std::string& ref = spec.literal[i];
        if (starts_with(ref, "slot:")) {
          const std::string slot = ref.substr(5);
          const auto& cands = table_.slots.at(slot);
          int rank = match.slot_rank.count(slot) ? match.slot_rank.at(slot) : 0;
          bool exhausted = rank + 1 >= static_cast<int>(cands.size());
          if (!label_present(cands[rank], scene) && exhausted) return true;
        } else if (starts_with(ref, "label:")) {
          if (!label_present(ref.substr(6), scene)) return true;
        } else if (starts_with(ref, "room:")) {
          if (!scene.has_room(ref.substr(5))) return true;
        }
      }
    }
    return false;
  }

  void add_containment_init(const pddl::DomainAst& domain, const DistilledScene& scene,
                            pddl::ProblemAst& prob) const {
    const auto& rule = *table_.containment;
    for (const auto& e : scene.entries) {
      auto container = container_from_description(e.description, scene);
      if (!container) continue;
      const auto* content_obj = prob.find_object(e.object_id);
      const auto* container_obj = prob.find_object(*container);
      if (!content_obj || !container_obj) continue;
      if (!domain.is_subtype(content_obj->type, rule.content_type)) continue;
      if (!domain.is_subtype(container_obj->type, rule.container_type)) continue;
      prob.init.push_back({rule.predicate, {e.object_id, *container}, true});
    }
  }

  /// Looks for "inside [the|a|an] <id>" in an object description and
  /// resolves <id> against the scene.
  static std::optional<std::string> container_from_description(const std::string& desc,
                                                               const DistilledScene& scene) {
    size_t pos = desc.find("inside");
    if (pos == std::string::npos) return std::nullopt;
    std::string rest = desc.substr(pos + 6);
    std::string token;
    std::vector<std::string> words;
    for (char c : rest + " ") {
      if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == ',' || c == ';') {
        if (!token.empty()) words.push_back(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
    for (const auto& w : words) {
      if (w == "the" || w == "a" || w == "an" || w == "of") continue;
      std::string norm = normalize_symbol(w);
      for (const auto& e : scene.entries)
        if (normalize_symbol(e.object_id) == norm) return e.object_id;
      return std::nullopt;  // first real word either resolves or it does not
    }
    return std::nullopt;
  }

  void apply_faults(const GoalSpec& goal, const DistilledScene& scene,
                    pddl::ProblemAst& prob) const {
    for (const auto& fault : table_.faults) {
      if (fault.relaxation != goal.lineage.relaxation) continue;
      for (const auto& kind : fault.kinds) {
        if (starts_with(kind, "unknown_predicate:")) {
          std::string pred = kind.substr(std::string("unknown_predicate:").size());
          std::string a = scene.room_ids.front();
          std::string b = scene.room_ids.size() > 1 ? scene.room_ids[1] : a;
          prob.init.push_back({pred, {a, b}, true});
        } else if (starts_with(kind, "missing_object:")) {
          std::string label = kind.substr(std::string("missing_object:").size());
          for (auto it = prob.objects.begin(); it != prob.objects.end(); ++it) {
            if (label_of_id(it->name) == label) {
              prob.objects.erase(it);
              break;
            }
          }
        }
      }
    }
  }

  static void erase_literals_with_pred(pddl::ProblemAst& prob, const std::string& pred) {
    std::erase_if(prob.init, [&](const pddl::Literal& l) { return l.pred == pred; });
    prune_goal(prob.goal, [&](const pddl::Literal& l) { return l.pred == pred; });
  }

  void add_missing_object(pddl::ProblemAst& prob, const std::string& name,
                          const DistilledScene& scene) const {
    if (prob.find_object(name)) return;
    prob.objects.push_back({name, table_.object_type(label_of_id(name))});
    bool located = false;
    for (const auto& l : prob.init)
      if (l.pred == "at" && !l.args.empty() && l.args[0] == name) located = true;
    if (!located) {
      std::string room = scene.room_ids.empty() ? "nowhere" : scene.room_ids.front();
      for (const auto& e : scene.entries)
        if (e.object_id == name) room = e.room_id;
      prob.init.push_back({"at", {name, room}, true});
    }
  }

  static void truncate_literal_args(pddl::ProblemAst& prob, const std::string& pred,
                                    size_t want) {
    for (auto& l : prob.init)
      if (l.pred == pred && l.args.size() > want) l.args.resize(want);
    mutate_goal(prob.goal, [&](pddl::Literal& l) {
      if (l.pred == pred && l.args.size() > want) l.args.resize(want);
    });
  }

  static void replace_symbol(pddl::ProblemAst& prob, const std::string& from,
                             const std::string& to) {
    for (auto& o : prob.objects)
      if (o.name == from) o.name = to;
    // drop duplicate declarations the rename may have produced
    std::set<std::string> seen;
    std::erase_if(prob.objects,
                  [&](const pddl::TypedVar& o) { return !seen.insert(o.name).second; });
    for (auto& l : prob.init)
      for (auto& a : l.args)
        if (a == from) a = to;
    mutate_goal(prob.goal, [&](pddl::Literal& l) {
      for (auto& a : l.args)
        if (a == from) a = to;
    });
    std::set<std::string> init_seen;
    std::erase_if(prob.init, [&](const pddl::Literal& l) {
      return !init_seen.insert(pddl::atom_key(l.pred, l.args) + (l.positive ? "+" : "-")).second;
    });
  }

  template <typename Pred>
  static void prune_goal(pddl::Formula& f, const Pred& remove) {
    if (f.kind == pddl::Formula::Kind::conj) {
      std::erase_if(f.children, [&](const pddl::Formula& c) {
        return c.kind == pddl::Formula::Kind::literal && remove(c.lit);
      });
      for (auto& c : f.children) prune_goal(c, remove);
    } else if (f.kind == pddl::Formula::Kind::forall) {
      prune_goal(f.children[0], remove);
    }
  }

  template <typename Fn>
  static void mutate_goal(pddl::Formula& f, const Fn& fn) {
    if (f.kind == pddl::Formula::Kind::literal) fn(f.lit);
    for (auto& c : f.children) mutate_goal(c, fn);
  }

  RuleTable table_;
};

}  // namespace relaxplan
