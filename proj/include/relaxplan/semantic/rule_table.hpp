#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaxplan/error.hpp"
#include "relaxplan/scene_graph.hpp"
#include "relaxplan/text.hpp"

namespace relaxplan {

// Rule tables drive the scripted backend: ranked substitution slots,
// goal templates assembled from text fragments, relaxation order, and
// optional fault injection used to exercise the refinement loop.
//
// Goal texts are template instantiations: the fragment texts of the
// active (not yet dropped) conjuncts joined by " and ", with {slot}
// placeholders replaced by the currently selected candidate label. The
// backend recovers (template, slot choices, dropped set) from a plain
// goal text by enumerating the reachable instantiations.

struct ConjunctSpec {
  enum class Kind { literal, each_label, each_type, forall };
  Kind kind = Kind::literal;
  // literal/forall: the literal template; args use the forms
  //   "slot:<name>"  object bound to a substitution slot
  //   "label:<name>" lowest-id scene object with that label
  //   "room:<id>"    a room id, verbatim
  //   "$x"           iteration variable (each_*), "?v" bound variable (forall)
  //   anything else  verbatim symbol (e.g. robot)
  std::vector<std::string> literal;
  bool positive = true;
  std::string label;      // each_label
  std::string type;       // each_type (resolved through the type map)
  std::string var_type;   // forall
};

struct FragmentSpec {
  std::string id;
  std::string text;  // may contain {slot} placeholders
  std::vector<ConjunctSpec> conjuncts;
};

struct GoalTemplate {
  std::string id;
  std::vector<FragmentSpec> fragments;
  std::vector<std::string> relax_order;  // fragment ids that may be dropped, in drop order
};

struct FaultSpec {
  int relaxation = 0;                // applies when goal lineage i equals this
  std::vector<std::string> kinds;    // "unknown_predicate:<p>" | "missing_object:<label>"
};

struct Containment {
  std::string predicate;       // e.g. in-box
  std::string container_type;  // pddl type of the container
  std::string content_type;    // pddl type of the contents
};

struct RuleTable {
  std::string family;
  std::string domain_text;
  std::map<std::string, std::vector<std::string>> slots;  // slot -> ranked candidate labels
  std::map<std::string, std::string> type_map;             // label -> pddl type ("default" key)
  std::vector<GoalTemplate> goals;
  std::vector<FaultSpec> faults;
  std::optional<Containment> containment;

  std::string object_type(const std::string& label) const {
    auto it = type_map.find(label);
    if (it != type_map.end()) return it->second;
    it = type_map.find("default");
    return it != type_map.end() ? it->second : "item";
  }
};

/// A goal text resolved against a rule table.
struct GoalMatch {
  const GoalTemplate* tpl = nullptr;
  std::map<std::string, int> slot_rank;  // slot -> selected candidate rank
  std::set<std::string> dropped;         // dropped fragment ids
};

namespace rule_detail {

inline std::vector<std::string> referenced_slots(const GoalTemplate& tpl,
                                                 const std::set<std::string>& dropped) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& frag : tpl.fragments) {
    if (dropped.count(frag.id)) continue;
    const std::string& t = frag.text;
    size_t pos = 0;
    while ((pos = t.find('{', pos)) != std::string::npos) {
      size_t end = t.find('}', pos);
      if (end == std::string::npos) break;
      std::string slot = t.substr(pos + 1, end - pos - 1);
      if (seen.insert(slot).second) out.push_back(slot);
      pos = end + 1;
    }
  }
  return out;
}

inline std::string instantiate_fragment(const FragmentSpec& frag,
                                        const RuleTable& table,
                                        const std::map<std::string, int>& slot_rank) {
  std::string out;
  const std::string& t = frag.text;
  size_t pos = 0;
  while (pos < t.size()) {
    size_t open = t.find('{', pos);
    if (open == std::string::npos) {
      out += t.substr(pos);
      break;
    }
    out += t.substr(pos, open - pos);
    size_t close = t.find('}', open);
    if (close == std::string::npos) {
      out += t.substr(open);
      break;
    }
    std::string slot = t.substr(open + 1, close - open - 1);
    auto rank = slot_rank.find(slot);
    auto cands = table.slots.find(slot);
    if (rank != slot_rank.end() && cands != table.slots.end() &&
        rank->second < static_cast<int>(cands->second.size()))
      out += cands->second[rank->second];
    else
      out += slot;
    pos = close + 1;
  }
  return out;
}

}  // namespace rule_detail

/// Renders the goal text for a template state: active fragments joined
/// by " and ", slot placeholders replaced by the selected candidates.
inline std::string render_goal_text(const RuleTable& table, const GoalTemplate& tpl,
                                    const std::map<std::string, int>& slot_rank,
                                    const std::set<std::string>& dropped) {
  std::vector<std::string> parts;
  for (const auto& frag : tpl.fragments) {
    if (dropped.count(frag.id)) continue;
    parts.push_back(rule_detail::instantiate_fragment(frag, table, slot_rank));
  }
  return join(parts, " and ");
}

/// Recovers (template, slot ranks, dropped prefix) from a goal text by
/// enumerating the instantiations reachable through shift and relax.
inline std::optional<GoalMatch> match_goal(const RuleTable& table, const std::string& text) {
  std::string wanted = normalize_symbol(text);
  for (const auto& tpl : table.goals) {
    for (size_t ndrop = 0; ndrop <= tpl.relax_order.size(); ++ndrop) {
      std::set<std::string> dropped(tpl.relax_order.begin(), tpl.relax_order.begin() + ndrop);
      auto slots = rule_detail::referenced_slots(tpl, dropped);
      // odometer over candidate ranks of each referenced slot
      std::vector<int> rank(slots.size(), 0);
      for (;;) {
        std::map<std::string, int> slot_rank;
        for (size_t i = 0; i < slots.size(); ++i) slot_rank[slots[i]] = rank[i];
        if (normalize_symbol(render_goal_text(table, tpl, slot_rank, dropped)) == wanted) {
          GoalMatch m;
          m.tpl = &tpl;
          m.slot_rank = std::move(slot_rank);
          m.dropped = std::move(dropped);
          return m;
        }
        size_t d = 0;
        if (slots.empty()) break;
        while (d < slots.size()) {
          auto it = table.slots.find(slots[d]);
          int limit = it == table.slots.end() ? 1 : static_cast<int>(it->second.size());
          if (++rank[d] < limit) break;
          rank[d] = 0;
          ++d;
        }
        if (d == slots.size()) break;
      }
    }
  }
  return std::nullopt;
}

inline Result<RuleTable> parse_rule_table(const std::string& bytes,
                                          const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& ex) {
    return Error{ErrCode::config, std::string("rule table: ") + ex.what()};
  }
  try {
    RuleTable table;
    table.family = doc.at("family").get<std::string>();
    if (doc.contains("domain_file")) {
      std::string path = base_dir.empty() ? doc.at("domain_file").get<std::string>()
                                          : base_dir + "/" + doc.at("domain_file").get<std::string>();
      std::ifstream in(path);
      if (!in) return Error{ErrCode::io, "cannot read domain file '" + path + "'"};
      std::stringstream ss;
      ss << in.rdbuf();
      table.domain_text = ss.str();
    } else if (doc.contains("domain_text")) {
      table.domain_text = doc.at("domain_text").get<std::string>();
    }
    if (doc.contains("slots"))
      for (const auto& [slot, cands] : doc.at("slots").items())
        table.slots[slot] = cands.get<std::vector<std::string>>();
    if (doc.contains("types"))
      for (const auto& [label, type] : doc.at("types").items())
        table.type_map[label] = type.get<std::string>();
    for (const auto& g : doc.at("goals")) {
      GoalTemplate tpl;
      tpl.id = g.at("id").get<std::string>();
      for (const auto& f : g.at("fragments")) {
        FragmentSpec frag;
        frag.id = f.at("id").get<std::string>();
        frag.text = f.at("text").get<std::string>();
        for (const auto& c : f.value("conjuncts", nlohmann::json::array())) {
          ConjunctSpec spec;
          std::string kind = c.value("kind", "literal");
          if (kind == "literal")
            spec.kind = ConjunctSpec::Kind::literal;
          else if (kind == "each_label")
            spec.kind = ConjunctSpec::Kind::each_label;
          else if (kind == "each_type")
            spec.kind = ConjunctSpec::Kind::each_type;
          else if (kind == "forall")
            spec.kind = ConjunctSpec::Kind::forall;
          else
            return Error{ErrCode::config, "rule table: unknown conjunct kind '" + kind + "'"};
          if (c.contains("literal"))
            spec.literal = c.at("literal").get<std::vector<std::string>>();
          spec.positive = c.value("positive", true);
          spec.label = c.value("label", "");
          spec.type = c.value("type", "");
          spec.var_type = c.value("var_type", "");
          frag.conjuncts.push_back(std::move(spec));
        }
        tpl.fragments.push_back(std::move(frag));
      }
      if (g.contains("relax_order"))
        tpl.relax_order = g.at("relax_order").get<std::vector<std::string>>();
      for (const auto& id : tpl.relax_order) {
        bool found = false;
        for (const auto& f : tpl.fragments) found |= f.id == id;
        if (!found)
          return Error{ErrCode::config,
                       "rule table: relax_order entry '" + id + "' is not a fragment id"};
      }
      table.goals.push_back(std::move(tpl));
    }
    if (doc.contains("faults")) {
      for (const auto& f : doc.at("faults")) {
        FaultSpec spec;
        spec.relaxation = f.at("relaxation").get<int>();
        spec.kinds = f.at("kinds").get<std::vector<std::string>>();
        table.faults.push_back(std::move(spec));
      }
    }
    if (doc.contains("containment")) {
      const auto& c = doc.at("containment");
      table.containment = Containment{c.at("predicate").get<std::string>(),
                                      c.at("container_type").get<std::string>(),
                                      c.at("content_type").get<std::string>()};
    }
    return table;
  } catch (const nlohmann::json::exception& ex) {
    return Error{ErrCode::config, std::string("rule table: ") + ex.what()};
  }
}

inline Result<RuleTable> load_rule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{ErrCode::io, "cannot read rule table '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  std::string base = path;
  size_t slash = base.find_last_of('/');
  base = slash == std::string::npos ? std::string() : base.substr(0, slash);
  return parse_rule_table(ss.str(), base);
}

}  // namespace relaxplan
