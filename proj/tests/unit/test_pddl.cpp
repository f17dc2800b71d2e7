#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "relaxplan/pddl/parser.hpp"
#include "relaxplan/pddl/printer.hpp"

using namespace relaxplan;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalDomain = R"(
(define (domain mini)
  (:requirements :strips :typing)
  (:types room - object)
  (:predicates (robot-at ?r - room))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (robot-at ?from)
    :effect (and (not (robot-at ?from)) (robot-at ?to))))
)";

}  // namespace

TEST_CASE("minimal domain parses") {
  auto dom = pddl::parse_domain(kMinimalDomain);
  REQUIRE(dom.ok());
  CHECK(dom.value().name == "mini");
  CHECK(dom.value().actions.size() == 1);
  CHECK(dom.value().actions[0].params.size() == 2);
  CHECK(dom.value().predicates.size() == 1);
}

TEST_CASE("constructs outside the subset are rejected as unsupported") {
  SECTION("requirement flag") {
    auto dom = pddl::parse_domain(
        "(define (domain d) (:requirements :strips :disjunctive-preconditions))");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unsupported_feature);
    CHECK(dom.error().message.find("disjunctive-preconditions") != std::string::npos);
  }
  SECTION("or in precondition") {
    auto dom = pddl::parse_domain(R"((define (domain d)
      (:predicates (p) (q))
      (:action a :parameters () :precondition (or (p) (q)) :effect (p))))");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unsupported_feature);
  }
  SECTION("conditional effect") {
    auto dom = pddl::parse_domain(R"((define (domain d)
      (:predicates (p) (q))
      (:action a :parameters () :precondition (p) :effect (when (p) (q)))))");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unsupported_feature);
  }
  SECTION("numeric fluents section") {
    auto dom = pddl::parse_domain("(define (domain d) (:functions (cost)))");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unsupported_feature);
  }
  SECTION("exists") {
    auto dom = pddl::parse_domain(R"((define (domain d)
      (:types t - object) (:predicates (p ?x - t))
      (:action a :parameters () :precondition (exists (?x - t) (p ?x)) :effect (p ?x))))");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unsupported_feature);
  }
}

TEST_CASE("syntax errors carry position and expectation") {
  auto dom = pddl::parse_domain("(define (domain d) (:types a - ))");
  REQUIRE(!dom.ok());
  CHECK(dom.code() == ErrCode::syntax);
  CHECK(dom.error().line >= 1);
}

TEST_CASE("problem parsing resolves predicates against the domain") {
  auto dom = pddl::parse_domain(kMinimalDomain);
  REQUIRE(dom.ok());

  SECTION("undeclared predicate in init") {
    auto prob = pddl::parse_problem(R"((define (problem p) (:domain mini)
      (:objects r1 r2 - room)
      (:init (connected r1 r2))
      (:goal (robot-at r2))))", dom.value());
    REQUIRE(!prob.ok());
    CHECK(prob.code() == ErrCode::unknown_predicate);
    CHECK(prob.error().message.find("connected") != std::string::npos);
  }
  SECTION("empty init, literal goal") {
    auto prob = pddl::parse_problem(R"((define (problem p) (:domain mini)
      (:objects r1 - room) (:init) (:goal (robot-at r1))))", dom.value());
    REQUIRE(prob.ok());
    CHECK(prob.value().init.empty());
    CHECK(prob.value().goal.kind == pddl::Formula::Kind::literal);
  }
  SECTION("arity mismatch") {
    auto prob = pddl::parse_problem(R"((define (problem p) (:domain mini)
      (:objects r1 - room) (:init (robot-at r1 r1)) (:goal (robot-at r1))))", dom.value());
    REQUIRE(!prob.ok());
    CHECK(prob.code() == ErrCode::arity_mismatch);
  }
  SECTION("unknown type") {
    auto prob = pddl::parse_problem(R"((define (problem p) (:domain mini)
      (:objects m - vehicle) (:init) (:goal (robot-at m))))", dom.value());
    REQUIRE(!prob.ok());
    CHECK(prob.code() == ErrCode::unknown_type);
  }
}

TEST_CASE("universal goals parse") {
  auto dom = pddl::parse_domain(R"((define (domain d)
    (:requirements :strips :typing :universal-preconditions)
    (:types box - object)
    (:predicates (empty ?b - box))
    (:action emptyit :parameters (?b - box) :precondition (and) :effect (empty ?b))))");
  REQUIRE(dom.ok());
  auto prob = pddl::parse_problem(R"((define (problem p) (:domain d)
    (:objects b1 b2 - box)
    (:init)
    (:goal (forall (?b - box) (empty ?b)))))", dom.value());
  REQUIRE(prob.ok());
  CHECK(prob.value().goal.kind == pddl::Formula::Kind::forall);
  CHECK(prob.value().goal.var.name == "?b");
}

TEST_CASE("plan parsing is domain-relative") {
  auto dom = pddl::parse_domain(kMinimalDomain);
  REQUIRE(dom.ok());

  SECTION("single step") {
    auto plan = pddl::parse_plan("(move kitchen hall)\n", dom.value());
    REQUIRE(plan.ok());
    REQUIRE(plan.value().steps.size() == 1);
    CHECK(plan.value().steps[0].name == "move");
    CHECK(plan.value().steps[0].args == std::vector<std::string>{"kitchen", "hall"});
  }
  SECTION("unknown action") {
    auto plan = pddl::parse_plan("(fly a b)\n", dom.value());
    REQUIRE(!plan.ok());
    CHECK(plan.code() == ErrCode::unknown_action);
  }
  SECTION("many lines keep order, comments are skipped") {
    std::string text = "; a comment\n";
    for (int i = 0; i < 24; ++i) text += "(move r" + std::to_string(i) + " r" + std::to_string(i + 1) + ")\n";
    auto plan = pddl::parse_plan(text, dom.value());
    REQUIRE(plan.ok());
    REQUIRE(plan.value().steps.size() == 24);
    CHECK(plan.value().steps[7].args[0] == "r7");
  }
  SECTION("arity mismatch") {
    auto plan = pddl::parse_plan("(move a b c)\n", dom.value());
    REQUIRE(!plan.ok());
    CHECK(plan.code() == ErrCode::arity_mismatch);
  }
}

TEST_CASE("render round-trips on the fixture corpus") {
  namespace fs = std::filesystem;
  fs::path dir = fs::path(RELAXPLAN_FIXTURE_DIR) / "pddl";
  int domains = 0, problems = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 20);

  std::optional<pddl::DomainAst> last_domain;
  for (const auto& file : files) {
    std::string text = read_file(file.string());
    INFO(file.string());
    if (file.filename().string().find("domain") != std::string::npos) {
      auto dom = pddl::parse_domain(text);
      REQUIRE(dom.ok());
      std::string rendered = pddl::render(dom.value());
      auto again = pddl::parse_domain(rendered);
      REQUIRE(again.ok());
      CHECK(again.value() == dom.value());
      CHECK(pddl::render(again.value()) == rendered);  // idempotent formatting
      last_domain = dom.value();
      ++domains;
    } else {
      REQUIRE(last_domain.has_value());
      auto prob = pddl::parse_problem(text, *last_domain);
      REQUIRE(prob.ok());
      std::string rendered = pddl::render(prob.value());
      auto again = pddl::parse_problem(rendered, *last_domain);
      REQUIRE(again.ok());
      CHECK(again.value() == prob.value());
      CHECK(pddl::render(again.value()) == rendered);
      ++problems;
    }
  }
  CHECK(domains >= 8);
  CHECK(problems >= 8);
}

TEST_CASE("plan rendering is one lowercase s-expression per line") {
  pddl::Plan plan;
  plan.steps.push_back({"move", {"r1", "r2"}});
  plan.steps.push_back({"pick", {"mop_1", "r2"}});
  CHECK(pddl::render(plan) == "(move r1 r2)\n(pick mop_1 r2)\n");
}

TEST_CASE("ground-truth dining setup domain parses with the authored action count") {
  std::string text =
      read_file(std::string(RELAXPLAN_DATA_DIR) + "/mini/dining_setup/domain.pddl");
  auto dom = pddl::parse_domain(text);
  REQUIRE(dom.ok());
  CHECK(dom.value().actions.size() == 4);  // move, pick, drop, place-on
  CHECK(dom.value().name == "dining_setup");
}

TEST_CASE("parser reads case-insensitively and stores lowercase") {
  auto dom = pddl::parse_domain(R"((DEFINE (DOMAIN Mixed)
    (:PREDICATES (At ?X))
    (:ACTION Go :parameters (?X) :precondition (AND) :effect (AT ?X))))");
  REQUIRE(dom.ok());
  CHECK(dom.value().name == "mixed");
  CHECK(dom.value().actions[0].name == "go");
  CHECK(dom.value().actions[0].effect[0].pred == "at");
}
