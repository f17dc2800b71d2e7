#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "relaxplan/checker.hpp"
#include "relaxplan/pddl/ast.hpp"
#include "relaxplan/scene_graph.hpp"
#include "relaxplan/text.hpp"

namespace relaxplan {

// Plan grounding check: every action argument must name something that
// exists in the scene. This is the guard against symbols the language
// model invented.

/// The one reserved constant: plans move a single agent and scenes do
/// not contain it as a node.
inline bool is_reserved_symbol(const std::string& normalized) { return normalized == "robot"; }

struct GroundingReport {
  struct Unmatched {
    int step;    // 0-based plan step
    int arg;     // 0-based argument position
    std::string symbol;

    bool operator==(const Unmatched&) const = default;
  };

  bool ok = true;
  std::vector<Unmatched> unmatched;            // plan order
  std::map<std::string, std::string> matched;  // symbol -> scene id (verbatim)
  std::vector<Unmatched> label_fallbacks;      // matched via label prefix only
};

inline GroundingReport check_ground(const pddl::Plan& plan, const DistilledScene& scene,
                                    const pddl::DomainAst& /*domain*/) {
  GroundingReport report;
  for (size_t t = 0; t < plan.steps.size(); ++t) {
    const auto& step = plan.steps[t];
    for (size_t i = 0; i < step.args.size(); ++i) {
      const std::string& sym = step.args[i];
      std::string norm = normalize_symbol(sym);
      if (is_reserved_symbol(norm)) {
        report.matched.emplace(sym, norm);
        continue;
      }
      bool found = false;
      for (const auto& room : scene.room_ids) {
        if (normalize_symbol(room) == norm) {
          report.matched.emplace(sym, room);
          found = true;
          break;
        }
      }
      if (!found) {
        for (const auto& entry : scene.entries) {
          if (normalize_symbol(entry.object_id) == norm) {
            report.matched.emplace(sym, entry.object_id);
            found = true;
            break;
          }
        }
      }
      if (!found) {
        // label fallback: unique object whose label part equals the symbol
        std::vector<const DistilledEntry*> by_label;
        for (const auto& entry : scene.entries)
          if (normalize_symbol(label_of_id(entry.object_id)) == norm) by_label.push_back(&entry);
        if (by_label.size() == 1) {
          report.matched.emplace(sym, by_label[0]->object_id);
          report.label_fallbacks.push_back(
              {static_cast<int>(t), static_cast<int>(i), sym});
          found = true;
        }
      }
      if (!found) {
        report.unmatched.push_back({static_cast<int>(t), static_cast<int>(i), sym});
        report.ok = false;
      }
    }
  }
  return report;
}

namespace grounding_detail {

/// Up to three nearest scene symbols: edit distance at most 3 on the
/// normalized ids, or a shared label prefix, ranked by distance then id.
inline std::vector<std::string> candidates_for(const std::string& symbol,
                                               const DistilledScene& scene) {
  std::string norm = normalize_symbol(symbol);
  std::string label = label_of_id(norm);
  std::vector<std::pair<int, std::string>> ranked;
  auto consider = [&](const std::string& id) {
    std::string nid = normalize_symbol(id);
    int dist = edit_distance(norm, nid);
    bool same_label = normalize_symbol(label_of_id(nid)) == label;
    if (dist <= 3 || same_label) ranked.emplace_back(dist, id);
  };
  for (const auto& e : scene.entries) consider(e.object_id);
  for (const auto& r : scene.room_ids) consider(r);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (const auto& [dist, id] : ranked) {
    out.push_back(id);
    if (out.size() == 3) break;
  }
  return out;
}

}  // namespace grounding_detail

/// One feedback item per unmatched occurrence, in plan order, each
/// naming the symbol, the step, and nearby scene symbols as candidates.
inline std::vector<FeedbackItem> validate_ground(const pddl::Plan& plan,
                                                 const DistilledScene& scene,
                                                 const GroundingReport& report) {
  std::vector<FeedbackItem> items;
  for (const auto& um : report.unmatched) {
    std::string msg = "symbol '" + um.symbol + "' not found in scene (step " +
                      std::to_string(um.step + 1);
    if (um.step >= 0 && um.step < static_cast<int>(plan.steps.size()))
      msg += " " + plan.steps[um.step].to_string();
    msg += ", arg " + std::to_string(um.arg + 1) + ")";
    auto cands = grounding_detail::candidates_for(um.symbol, scene);
    if (!cands.empty()) msg += "; candidates: " + join(cands, ", ");
    items.push_back({FeedbackSource::grounding, Severity::error, std::move(msg), um.step});
  }
  for (const auto& fb : report.label_fallbacks) {
    items.push_back({FeedbackSource::grounding, Severity::warning,
                     "symbol '" + fb.symbol + "' matched object '" +
                         report.matched.at(fb.symbol) + "' by label only",
                     fb.step});
  }
  return items;
}

}  // namespace relaxplan
