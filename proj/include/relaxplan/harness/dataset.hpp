#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaxplan/error.hpp"
#include "relaxplan/scene_graph.hpp"

namespace relaxplan {

// Dataset layout (docs/dataset_layout.md):
//   <root>/scenes/<scene_id>.json
//   <root>/<family>/description.txt    natural-language domain description
//   <root>/<family>/domain.pddl        ground-truth domain for the split
//   <root>/<family>/rules.json         scripted-backend rule table
//   <root>/<family>/<task_id>/task.meta
//   <root>/<family>/<task_id>/{domain.pddl,problem.pddl,plan.plan}  optional ground truth

enum class TaskFamily { dining_setup, house_cleaning, pc_assembly, laundry, office_setup };

inline const std::vector<std::pair<TaskFamily, std::string>>& family_names() {
  static const std::vector<std::pair<TaskFamily, std::string>> names = {
      {TaskFamily::dining_setup, "dining_setup"},
      {TaskFamily::house_cleaning, "house_cleaning"},
      {TaskFamily::pc_assembly, "pc_assembly"},
      {TaskFamily::laundry, "laundry"},
      {TaskFamily::office_setup, "office_setup"},
  };
  return names;
}

inline std::string family_name(TaskFamily f) {
  for (const auto& [fam, name] : family_names())
    if (fam == f) return name;
  return "?";
}

inline std::string family_short_name(TaskFamily f) {
  switch (f) {
    case TaskFamily::dining_setup: return "DS";
    case TaskFamily::house_cleaning: return "HC";
    case TaskFamily::pc_assembly: return "PC";
    case TaskFamily::laundry: return "LA";
    case TaskFamily::office_setup: return "OS";
  }
  return "?";
}

inline Result<TaskFamily> family_from_name(const std::string& name) {
  for (const auto& [fam, fname] : family_names())
    if (fname == name) return fam;
  return Error{ErrCode::unknown_family, "unknown task family '" + name + "'"};
}

struct GroundTruthFiles {
  std::optional<std::string> domain_file;
  std::optional<std::string> problem_file;
  std::optional<std::string> plan_file;
};

struct TaskSpec {
  std::string id;
  TaskFamily family = TaskFamily::dining_setup;
  std::string scene_id;
  std::string scene_file;
  std::string goal_text;
  std::string domain_desc;
  std::string rules_file;         // scripted-backend rule table for this split
  std::string family_domain_file; // split-level ground-truth domain
  GroundTruthFiles ground_truth;
  std::vector<ObjectNode> items_to_scatter;
  bool designed_impossible = false;
};

namespace dataset_detail {

inline Result<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return Error{ErrCode::io, "cannot read '" + path.string() + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Error layout_error(const std::filesystem::path& path, const std::string& reason) {
  return Error{ErrCode::layout, path.string() + ": " + reason};
}

}  // namespace dataset_detail

inline Result<std::vector<TaskSpec>> load_dataset(const std::string& root) {
  namespace fs = std::filesystem;
  using dataset_detail::layout_error;

  fs::path rootp(root);
  if (!fs::is_directory(rootp)) return layout_error(rootp, "not a directory");
  if (!fs::is_directory(rootp / "scenes")) return layout_error(rootp / "scenes", "missing");

  std::vector<TaskSpec> tasks;
  std::vector<std::string> family_dirs;
  for (const auto& entry : fs::directory_iterator(rootp)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    if (name == "scenes") continue;
    family_dirs.push_back(name);
  }
  std::sort(family_dirs.begin(), family_dirs.end());

  for (const auto& fam_name : family_dirs) {
    auto fam = family_from_name(fam_name);
    if (!fam.ok()) return fam.error();
    fs::path fam_dir = rootp / fam_name;

    auto desc = dataset_detail::read_file(fam_dir / "description.txt");
    if (!desc.ok())
      return layout_error(fam_dir / "description.txt", "missing domain description");
    if (!fs::exists(fam_dir / "domain.pddl"))
      return layout_error(fam_dir / "domain.pddl", "missing ground-truth domain");
    fs::path rules = fam_dir / "rules.json";
    if (!fs::exists(rules)) return layout_error(rules, "missing rule table");

    std::vector<std::string> task_dirs;
    for (const auto& entry : fs::directory_iterator(fam_dir))
      if (entry.is_directory()) task_dirs.push_back(entry.path().filename().string());
    std::sort(task_dirs.begin(), task_dirs.end());

    for (const auto& task_id : task_dirs) {
      fs::path task_dir = fam_dir / task_id;
      auto meta_text = dataset_detail::read_file(task_dir / "task.meta");
      if (!meta_text.ok()) return layout_error(task_dir / "task.meta", "missing");

      nlohmann::json meta;
      try {
        meta = nlohmann::json::parse(meta_text.value());
      } catch (const nlohmann::json::parse_error& ex) {
        return layout_error(task_dir / "task.meta", ex.what());
      }
      try {
        TaskSpec task;
        task.id = task_id;
        task.family = fam.value();
        task.scene_id = meta.at("scene").get<std::string>();
        task.goal_text = meta.at("goal_text").get<std::string>();
        task.designed_impossible = meta.value("designed_impossible", false);
        task.domain_desc = trim(desc.value());
        task.rules_file = rules.string();
        task.family_domain_file = (fam_dir / "domain.pddl").string();
        fs::path scene_file = rootp / "scenes" / (task.scene_id + ".json");
        if (!fs::exists(scene_file))
          return layout_error(scene_file, "scene referenced by task '" + task_id + "' missing");
        task.scene_file = scene_file.string();
        for (const auto& item : meta.value("items_to_scatter", nlohmann::json::array())) {
          ObjectNode node;
          node.id = item.at("id").get<std::string>();
          node.label = item.value("label", label_of_id(node.id));
          node.description = item.value("description", "");
          task.items_to_scatter.push_back(std::move(node));
        }
        if (fs::exists(task_dir / "domain.pddl"))
          task.ground_truth.domain_file = (task_dir / "domain.pddl").string();
        if (fs::exists(task_dir / "problem.pddl"))
          task.ground_truth.problem_file = (task_dir / "problem.pddl").string();
        if (fs::exists(task_dir / "plan.plan"))
          task.ground_truth.plan_file = (task_dir / "plan.plan").string();
        tasks.push_back(std::move(task));
      } catch (const nlohmann::json::exception& ex) {
        return layout_error(task_dir / "task.meta", ex.what());
      }
    }
  }
  return tasks;
}

inline Result<SceneGraph> load_scene_file(const std::string& path) {
  auto text = dataset_detail::read_file(path);
  if (!text.ok()) return text.error();
  return parse_scene(text.value());
}

}  // namespace relaxplan
