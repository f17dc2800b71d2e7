// Command-line front end: solve a single task, run the planner or
// validator on PDDL files, check plan grounding against a scene, run a
// dataset benchmark, scatter items into a scene, or verify a dataset
// layout. Exit codes: 0 success, 1 task failure, 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relaxplan/harness/bench.hpp"
#include "relaxplan/harness/dataset.hpp"
#include "relaxplan/harness/report.hpp"
#include "relaxplan/orchestrator.hpp"
#include "relaxplan/pddl/parser.hpp"
#include "relaxplan/pddl/printer.hpp"
#include "relaxplan/planner.hpp"
#include "relaxplan/semantic/llm_backend.hpp"
#include "relaxplan/semantic/scripted_backend.hpp"
#include "relaxplan/solve_report.hpp"

namespace {

using namespace relaxplan;

constexpr int kOk = 0;
constexpr int kTaskFailure = 1;
constexpr int kUsageError = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) return false;
  out << content;
  return true;
}

int fail_config(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kUsageError;
}

struct PlannerFlags {
  std::string mode = "gbfs";
  long max_expanded = -1;
  double max_seconds = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "search mode: gbfs or bfs")
        ->check(CLI::IsMember({"gbfs", "bfs"}));
    cmd->add_option("--max-expanded", max_expanded, "expansion limit (-1: unlimited)");
    cmd->add_option("--max-seconds", max_seconds, "planner time limit (-1: unlimited)");
  }
  SearchMode search_mode() const {
    return mode == "bfs" ? SearchMode::bfs : SearchMode::gbfs_hadd;
  }
  SearchLimits limits() const { return {max_expanded, max_seconds}; }
};

int cmd_plan(const std::string& domain_file, const std::string& problem_file,
             const PlannerFlags& flags) {
  auto dtext = read_file(domain_file);
  if (!dtext) return fail_config("cannot read " + domain_file);
  auto ptext = read_file(problem_file);
  if (!ptext) return fail_config("cannot read " + problem_file);
  auto domain = pddl::parse_domain(*dtext);
  if (!domain.ok()) return fail_config(domain.error().describe());
  auto problem = pddl::parse_problem(*ptext, domain.value());
  if (!problem.ok()) return fail_config(problem.error().describe());

  auto inst = instantiate_check(domain.value(), problem.value());
  if (!inst.ok) {
    std::cerr << render_feedback(inst) << "\n";
    return kTaskFailure;
  }
  auto task = ground(domain.value(), problem.value());
  if (!task.ok()) return fail_config(task.error().describe());
  PlanResult result = search(task.value(), flags.search_mode(), flags.limits());
  std::cerr << "outcome: "
            << (result.solved() ? "solved"
                                : result.outcome == PlanResult::Outcome::unsolvable
                                      ? "unsolvable"
                                      : "resource_limit")
            << "  expanded: " << result.stats.expanded_nodes
            << "  generated: " << result.stats.generated_nodes
            << "  time: " << result.stats.wall_time << "s\n";
  if (!result.solved()) return kTaskFailure;
  std::cout << pddl::render(*result.plan);
  return kOk;
}

int cmd_validate(const std::string& domain_file, const std::string& problem_file,
                 const std::string& plan_file, bool machine) {
  auto dtext = read_file(domain_file);
  if (!dtext) return fail_config("cannot read " + domain_file);
  auto ptext = read_file(problem_file);
  if (!ptext) return fail_config("cannot read " + problem_file);
  auto domain = pddl::parse_domain(*dtext);
  if (!domain.ok()) return fail_config(domain.error().describe());
  auto problem = pddl::parse_problem(*ptext, domain.value());
  if (!problem.ok()) return fail_config(problem.error().describe());

  ValidationReport report = instantiate_check(domain.value(), problem.value());
  if (report.ok && !plan_file.empty()) {
    auto plan_text = read_file(plan_file);
    if (!plan_text) return fail_config("cannot read " + plan_file);
    auto plan = pddl::parse_plan(*plan_text, domain.value());
    if (!plan.ok()) return fail_config(plan.error().describe());
    report = validate_plan(domain.value(), problem.value(), plan.value());
  }
  if (machine) {
    nlohmann::json doc = {{"ok", report.ok},
                          {"items", report_detail::feedback_to_json(report.items)}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << render_feedback(report) << "\n";
  }
  return report.ok ? kOk : kTaskFailure;
}

int cmd_ground_check(const std::string& domain_file, const std::string& plan_file,
                     const std::string& scene_file) {
  auto dtext = read_file(domain_file);
  if (!dtext) return fail_config("cannot read " + domain_file);
  auto domain = pddl::parse_domain(*dtext);
  if (!domain.ok()) return fail_config(domain.error().describe());
  auto plan_text = read_file(plan_file);
  if (!plan_text) return fail_config("cannot read " + plan_file);
  auto plan = pddl::parse_plan(*plan_text, domain.value());
  if (!plan.ok()) return fail_config(plan.error().describe());
  auto scene = load_scene_file(scene_file);
  if (!scene.ok()) return fail_config(scene.error().describe());
  DistilledScene distilled = distill(scene.value());

  GroundingReport report = check_ground(plan.value(), distilled, domain.value());
  auto items = validate_ground(plan.value(), distilled, report);
  if (items.empty())
    std::cout << "grounding passed\n";
  else
    std::cout << render_feedback(items) << "\n";
  return report.ok ? kOk : kTaskFailure;
}

int cmd_scatter(const std::string& scene_file, const std::string& items_file, uint64_t seed,
                const std::string& out_file) {
  auto scene = load_scene_file(scene_file);
  if (!scene.ok()) return fail_config(scene.error().describe());
  auto items_text = read_file(items_file);
  if (!items_text) return fail_config("cannot read " + items_file);
  std::vector<ObjectNode> items;
  try {
    auto doc = nlohmann::json::parse(*items_text);
    for (const auto& item : doc) {
      ObjectNode node;
      node.id = item.at("id").get<std::string>();
      node.label = item.value("label", label_of_id(node.id));
      node.description = item.value("description", "");
      items.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& ex) {
    return fail_config(std::string("items file: ") + ex.what());
  }
  auto scattered = scatter_items(scene.value(), items, seed);
  if (!scattered.ok()) return fail_config(scattered.error().describe());

  nlohmann::json doc;
  const SceneGraph& s = scattered.value();
  doc["scene_id"] = s.scene_id;
  auto& rooms = doc["rooms"] = nlohmann::json::array();
  for (const auto& r : s.rooms) rooms.push_back({{"id", r.id}, {"label", r.label}});
  auto& objects = doc["objects"] = nlohmann::json::array();
  for (const auto& o : s.objects) {
    nlohmann::json j = {{"id", o.id}, {"label", o.label}, {"description", o.description},
                        {"room_id", o.room_id}};
    if (!o.attributes.empty()) j["attributes"] = o.attributes;
    if (o.position) j["position"] = {(*o.position)[0], (*o.position)[1], (*o.position)[2]};
    objects.push_back(std::move(j));
  }
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const auto& e : s.edges)
    edges.push_back({{"parent", e.parent}, {"child", e.child}, {"relation", e.relation}});
  std::string payload = doc.dump(2) + "\n";
  if (out_file.empty())
    std::cout << payload;
  else if (!write_file(out_file, payload))
    return fail_config("cannot write " + out_file);
  return kOk;
}

struct SolveFlags {
  std::string goal;
  std::string scene_file;
  std::string desc;
  std::string desc_file;
  std::string domain_file;
  std::string backend = "scripted";
  std::string rules_file;
  int max_outer = 4;
  int max_inner = 4;
  bool possibility = false;
  std::string report_file;
  PlannerFlags planner;
};

int cmd_solve(const SolveFlags& flags) {
  auto scene_graph = load_scene_file(flags.scene_file);
  if (!scene_graph.ok()) return fail_config(scene_graph.error().describe());
  DistilledScene scene = distill(scene_graph.value());

  std::string desc = flags.desc;
  if (!flags.desc_file.empty()) {
    auto text = read_file(flags.desc_file);
    if (!text) return fail_config("cannot read " + flags.desc_file);
    desc = *text;
  }

  std::unique_ptr<SemanticBackend> backend;
  if (flags.backend == "scripted") {
    if (flags.rules_file.empty()) return fail_config("--rules is required with --backend scripted");
    auto table = load_rule_table(flags.rules_file);
    if (!table.ok()) return fail_config(table.error().describe());
    backend = std::make_unique<ScriptedBackend>(std::move(table).take());
  } else {
    backend = std::make_unique<LlmBackend>(LlmConfig::from_env());
  }

  std::optional<pddl::DomainAst> initial_domain;
  if (!flags.domain_file.empty()) {
    auto text = read_file(flags.domain_file);
    if (!text) return fail_config("cannot read " + flags.domain_file);
    auto parsed = pddl::parse_domain(*text);
    if (!parsed.ok()) return fail_config(parsed.error().describe());
    initial_domain = std::move(parsed).take();
  }

  SolveConfig cfg;
  cfg.max_outer = flags.max_outer;
  cfg.max_inner = flags.max_inner;
  cfg.mode = flags.planner.search_mode();
  cfg.limits = flags.planner.limits();
  cfg.possibility_check = flags.possibility;

  auto result = solve(*backend, flags.goal, scene, desc, initial_domain, cfg);
  if (!result.ok()) return fail_config(result.error().describe());
  const SolveResult& r = result.value();

  if (!flags.report_file.empty()) {
    auto doc = solve_report_json(r, cfg, backend->name(), flags.goal, scene.scene_id);
    if (!write_file(flags.report_file, doc.dump(2) + "\n"))
      return fail_config("cannot write " + flags.report_file);
  }
  std::cerr << "outcome: " << (r.grounded() ? "grounded" : "exhausted")
            << "  relaxations: " << r.trace.total_relaxations
            << "  refinements: " << r.trace.total_refinements
            << "  semantic distance: " << r.trace.semantic_distance << "\n";
  if (r.possibility)
    std::cerr << "possibility: " << (r.possibility->possible ? "possible" : "impossible") << " ("
              << r.possibility->rationale << ")\n";
  if (!r.grounded()) return kTaskFailure;
  std::cout << pddl::render(*r.plan);
  return kOk;
}

struct BenchFlags {
  std::string dataset;
  std::string backend = "scripted";
  uint64_t seed = 0;
  int workers = 1;
  int max_outer = 4;
  int max_inner = 4;
  bool possibility = false;
  bool ground_truth_domain = false;
  std::string out_dir;
  PlannerFlags planner;
};

int cmd_bench(const BenchFlags& flags) {
  auto tasks = load_dataset(flags.dataset);
  if (!tasks.ok()) return fail_config(tasks.error().describe());

  BenchConfig cfg;
  cfg.backend = flags.backend == "llm" ? BackendKind::llm : BackendKind::scripted;
  cfg.llm = LlmConfig::from_env();
  cfg.seed = flags.seed;
  cfg.workers = flags.workers;
  cfg.use_ground_truth_domain = flags.ground_truth_domain;
  cfg.solve.max_outer = flags.max_outer;
  cfg.solve.max_inner = flags.max_inner;
  cfg.solve.mode = flags.planner.search_mode();
  cfg.solve.limits = flags.planner.limits();
  cfg.solve.possibility_check = flags.possibility;

  BenchOutcome outcome = run_bench(tasks.value(), cfg);
  std::cout << render_report(outcome.report, ReportFormat::table);

  if (!flags.out_dir.empty()) {
    std::filesystem::create_directories(flags.out_dir);
    write_file(flags.out_dir + "/report.json",
               render_report(outcome.report, ReportFormat::machine));
    write_file(flags.out_dir + "/report.csv", render_report(outcome.report, ReportFormat::csv));
    write_file(flags.out_dir + "/report.txt", render_report(outcome.report, ReportFormat::table));
    std::filesystem::create_directories(flags.out_dir + "/solves");
    for (const auto& doc : outcome.solve_reports) {
      std::string id = doc.value("task_id", "task");
      write_file(flags.out_dir + "/solves/" + id + ".json", doc.dump(2) + "\n");
    }
    std::cerr << "report written to " << flags.out_dir << "\n";
  }
  for (const auto& rec : outcome.report.records)
    if (!rec.success_grounding) return kTaskFailure;
  return kOk;
}

int cmd_dataset_verify(const std::string& root) {
  auto tasks = load_dataset(root);
  if (!tasks.ok()) {
    std::cerr << tasks.error().describe() << "\n";
    return kTaskFailure;
  }
  // layout is sound; now deep-check whatever ground truth is present
  int gt_checked = 0;
  for (const auto& t : tasks.value()) {
    std::string domain_file = t.ground_truth.domain_file
                                  ? *t.ground_truth.domain_file
                                  : root + "/" + family_name(t.family) + "/domain.pddl";
    auto dtext = read_file(domain_file);
    if (!dtext) {
      std::cerr << t.id << ": cannot read " << domain_file << "\n";
      return kTaskFailure;
    }
    auto domain = pddl::parse_domain(*dtext);
    if (!domain.ok()) {
      std::cerr << t.id << ": domain: " << domain.error().describe() << "\n";
      return kTaskFailure;
    }
    if (!t.ground_truth.problem_file) continue;
    auto ptext = read_file(*t.ground_truth.problem_file);
    auto problem = ptext ? pddl::parse_problem(*ptext, domain.value())
                         : Result<pddl::ProblemAst>(Error{ErrCode::io, "unreadable"});
    if (!problem.ok()) {
      std::cerr << t.id << ": problem: " << problem.error().describe() << "\n";
      return kTaskFailure;
    }
    auto inst = instantiate_check(domain.value(), problem.value());
    if (!inst.ok) {
      std::cerr << t.id << ": ground truth fails instantiate check:\n"
                << render_feedback(inst) << "\n";
      return kTaskFailure;
    }
    if (t.ground_truth.plan_file) {
      auto plan_text = read_file(*t.ground_truth.plan_file);
      auto plan = plan_text ? pddl::parse_plan(*plan_text, domain.value())
                            : Result<pddl::Plan>(Error{ErrCode::io, "unreadable"});
      if (!plan.ok()) {
        std::cerr << t.id << ": plan: " << plan.error().describe() << "\n";
        return kTaskFailure;
      }
      auto report = validate_plan(domain.value(), problem.value(), plan.value());
      if (!report.ok) {
        std::cerr << t.id << ": ground-truth plan fails validation:\n"
                  << render_feedback(report) << "\n";
        return kTaskFailure;
      }
    }
    ++gt_checked;
  }
  std::map<std::string, int> per_family;
  for (const auto& t : tasks.value()) per_family[family_name(t.family)]++;
  std::cout << "dataset ok: " << tasks.value().size() << " tasks, " << gt_checked
            << " with validated ground truth\n";
  for (const auto& [fam, count] : per_family)
    std::cout << "  " << fam << ": " << count << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDDL planning with iterative goal shifting and relaxation"};
  app.require_subcommand(1);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "run the planner on a domain/problem pair");
  std::string plan_domain, plan_problem;
  PlannerFlags plan_flags;
  plan_cmd->add_option("-d,--domain", plan_domain, "domain file")->required();
  plan_cmd->add_option("-p,--problem", plan_problem, "problem file")->required();
  plan_flags.attach(plan_cmd);

  // validate
  auto* val_cmd = app.add_subcommand("validate", "instantiate-check a pair, optionally replay a plan");
  std::string val_domain, val_problem, val_plan;
  bool val_machine = false;
  val_cmd->add_option("-d,--domain", val_domain, "domain file")->required();
  val_cmd->add_option("-p,--problem", val_problem, "problem file")->required();
  val_cmd->add_option("--plan", val_plan, "plan file to replay");
  val_cmd->add_flag("--machine", val_machine, "emit the report as JSON");

  // ground-check
  auto* gc_cmd = app.add_subcommand("ground-check", "check plan symbols against a scene");
  std::string gc_domain, gc_plan, gc_scene;
  gc_cmd->add_option("-d,--domain", gc_domain, "domain file")->required();
  gc_cmd->add_option("--plan", gc_plan, "plan file")->required();
  gc_cmd->add_option("--scene", gc_scene, "scene file")->required();

  // scatter
  auto* sc_cmd = app.add_subcommand("scatter", "randomly place items into a scene's rooms");
  std::string sc_scene, sc_items, sc_out;
  uint64_t sc_seed = 0;
  sc_cmd->add_option("--scene", sc_scene, "scene file")->required();
  sc_cmd->add_option("--items", sc_items, "JSON list of item templates")->required();
  sc_cmd->add_option("--seed", sc_seed, "scatter seed");
  sc_cmd->add_option("-o,--out", sc_out, "output scene file (default: stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve one task end to end");
  SolveFlags solve_flags;
  solve_cmd->add_option("--goal", solve_flags.goal, "natural-language goal")->required();
  solve_cmd->add_option("--scene", solve_flags.scene_file, "scene file")->required();
  solve_cmd->add_option("--desc", solve_flags.desc, "domain description text");
  solve_cmd->add_option("--desc-file", solve_flags.desc_file, "domain description file");
  solve_cmd->add_option("--domain", solve_flags.domain_file, "initial domain (skips generation)");
  solve_cmd->add_option("--backend", solve_flags.backend, "scripted or llm")
      ->check(CLI::IsMember({"scripted", "llm"}));
  solve_cmd->add_option("--rules", solve_flags.rules_file, "rule table for the scripted backend");
  solve_cmd->add_option("--max-outer", solve_flags.max_outer, "outer iteration cap");
  solve_cmd->add_option("--max-inner", solve_flags.max_inner, "inner refinement cap");
  solve_cmd->add_flag("--possibility-check", solve_flags.possibility,
                      "record an advisory possibility verdict");
  solve_cmd->add_option("--report", solve_flags.report_file, "write the solve report JSON here");
  solve_flags.planner.attach(solve_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a dataset benchmark");
  BenchFlags bench_flags;
  bench_cmd->add_option("--dataset", bench_flags.dataset, "dataset root")->required();
  bench_cmd->add_option("--backend", bench_flags.backend, "scripted or llm")
      ->check(CLI::IsMember({"scripted", "llm"}));
  bench_cmd->add_option("--seed", bench_flags.seed, "global scatter seed");
  bench_cmd->add_option("--workers", bench_flags.workers, "concurrent task workers");
  bench_cmd->add_option("--max-outer", bench_flags.max_outer, "outer iteration cap");
  bench_cmd->add_option("--max-inner", bench_flags.max_inner, "inner refinement cap");
  bench_cmd->add_flag("--possibility-check", bench_flags.possibility,
                      "record advisory possibility verdicts");
  bench_cmd->add_flag("--ground-truth-domain", bench_flags.ground_truth_domain,
                      "use per-task ground-truth domains instead of generation");
  bench_cmd->add_option("-o,--out", bench_flags.out_dir, "directory for report files");
  bench_flags.planner.attach(bench_cmd);

  // dataset verify
  auto* ds_cmd = app.add_subcommand("dataset", "dataset utilities");
  ds_cmd->require_subcommand(1);
  auto* dsv_cmd = ds_cmd->add_subcommand("verify", "check a dataset layout");
  std::string dsv_root;
  dsv_cmd->add_option("--root", dsv_root, "dataset root")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (plan_cmd->parsed()) return cmd_plan(plan_domain, plan_problem, plan_flags);
  if (val_cmd->parsed()) return cmd_validate(val_domain, val_problem, val_plan, val_machine);
  if (gc_cmd->parsed()) return cmd_ground_check(gc_domain, gc_plan, gc_scene);
  if (sc_cmd->parsed()) return cmd_scatter(sc_scene, sc_items, sc_seed, sc_out);
  if (solve_cmd->parsed()) return cmd_solve(solve_flags);
  if (bench_cmd->parsed()) return cmd_bench(bench_flags);
  if (ds_cmd->parsed() && dsv_cmd->parsed()) return cmd_dataset_verify(dsv_root);
  return kUsageError;
}
