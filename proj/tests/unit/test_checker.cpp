#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "relaxplan/checker.hpp"
#include "relaxplan/pddl/parser.hpp"

using namespace relaxplan;

namespace {

const char* kCleanDomain = R"(
(define (domain tidy)
  (:requirements :strips :typing :negative-preconditions :equality)
  (:types room agent item - object)
  (:predicates
    (robot-at ?r - room)
    (at ?i - item ?r - room)
    (holding ?i - item)
    (hand-free)
    (clean ?r - room))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (robot-at ?from) (not (= ?from ?to)))
    :effect (and (not (robot-at ?from)) (robot-at ?to)))
  (:action pick
    :parameters (?i - item ?r - room)
    :precondition (and (robot-at ?r) (at ?i ?r) (hand-free))
    :effect (and (holding ?i) (not (at ?i ?r)) (not (hand-free))))
  (:action drop
    :parameters (?i - item ?r - room)
    :precondition (and (robot-at ?r) (holding ?i))
    :effect (and (at ?i ?r) (hand-free) (not (holding ?i)))))
)";

pddl::DomainAst tidy_domain() {
  auto dom = pddl::parse_domain(kCleanDomain);
  REQUIRE(dom.ok());
  return dom.value();
}

pddl::ProblemAst tidy_problem(const pddl::DomainAst& dom, const std::string& text) {
  auto prob = pddl::parse_problem(text, dom);
  REQUIRE(prob.ok());
  return prob.value();
}

const char* kMoveMopProblem = R"(
(define (problem fetch) (:domain tidy)
  (:objects kitchen hall - room robot - agent mop_1 - item)
  (:init (robot-at kitchen) (hand-free) (at mop_1 hall))
  (:goal (and (at mop_1 kitchen))))
)";

}  // namespace

TEST_CASE("instantiate_check accepts a coherent pair and exposes the init state") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, kMoveMopProblem);
  auto report = instantiate_check(dom, prob);
  CHECK(report.ok);
  CHECK(report.error_count() == 0);
  REQUIRE(report.final_state.has_value());
  CHECK(std::find(report.final_state->begin(), report.final_state->end(), "at mop_1 hall") !=
        report.final_state->end());
}

TEST_CASE("instantiate_check flags a goal predicate no action achieves") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, R"(
    (define (problem wish) (:domain tidy)
      (:objects kitchen - room robot - agent)
      (:init (robot-at kitchen))
      (:goal (clean kitchen))))");
  auto report = instantiate_check(dom, prob);
  CHECK(!report.ok);
  bool found = false;
  for (const auto& item : report.items)
    found |= item.message.find("goal predicate 'clean' unreachable: no action adds it") !=
             std::string::npos;
  CHECK(found);
}

TEST_CASE("a goal atom already true in init needs no achiever") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, R"(
    (define (problem donealready) (:domain tidy)
      (:objects kitchen - room robot - agent)
      (:init (robot-at kitchen))
      (:goal (robot-at kitchen))))");
  CHECK(instantiate_check(dom, prob).ok);
}

TEST_CASE("instantiate_check reports undeclared types with a locus") {
  auto dom = tidy_domain();
  pddl::ProblemAst prob = tidy_problem(dom, kMoveMopProblem);
  prob.objects.push_back({"mop_2", "vehicle"});
  auto report = instantiate_check(dom, prob);
  CHECK(!report.ok);
  bool found = false;
  for (const auto& item : report.items) {
    if (item.message.find("undeclared type 'vehicle'") == std::string::npos) continue;
    found = true;
    REQUIRE(std::holds_alternative<std::string>(item.locus));
    CHECK(std::get<std::string>(item.locus).find("problem.objects") != std::string::npos);
  }
  CHECK(found);
}

TEST_CASE("instantiate_check reports undeclared predicates and objects in hand-built asts") {
  auto dom = tidy_domain();
  pddl::ProblemAst prob = tidy_problem(dom, kMoveMopProblem);
  prob.init.push_back({"connected", {"kitchen", "hall"}, true});
  prob.init.push_back({"at", {"ghost_1", "kitchen"}, true});
  auto report = instantiate_check(dom, prob);
  CHECK(!report.ok);
  std::string all;
  for (const auto& item : report.items) all += item.message + "\n";
  CHECK(all.find("undeclared predicate 'connected'") != std::string::npos);
  CHECK(all.find("object 'ghost_1' undeclared") != std::string::npos);
}

TEST_CASE("validate_plan on an empty plan with satisfied goal returns init") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, R"(
    (define (problem noop) (:domain tidy)
      (:objects kitchen - room robot - agent mop_1 - item)
      (:init (robot-at kitchen) (at mop_1 kitchen))
      (:goal (at mop_1 kitchen))))");
  auto report = validate_plan(dom, prob, pddl::Plan{});
  CHECK(report.ok);
  REQUIRE(report.final_state.has_value());
  std::vector<std::string> expected = {"at mop_1 kitchen", "robot-at kitchen"};
  CHECK(*report.final_state == expected);
}

TEST_CASE("validate_plan names the step, action, and literal of a failure") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, kMoveMopProblem);
  // mop is in the hall, so picking it in the kitchen fails on (at mop_1 kitchen)
  auto plan = pddl::parse_plan("(pick mop_1 kitchen)\n", dom);
  REQUIRE(plan.ok());
  auto report = validate_plan(dom, prob, plan.value());
  CHECK(!report.ok);
  REQUIRE(!report.items.empty());
  const auto& item = report.items.front();
  CHECK(item.message.find("step 1 (pick mop_1 kitchen)") != std::string::npos);
  CHECK(item.message.find("precondition (at mop_1 kitchen) unsatisfied") != std::string::npos);
  REQUIRE(std::holds_alternative<int>(item.locus));
  CHECK(std::get<int>(item.locus) == 0);
  CHECK(!report.final_state.has_value());

  // a later step failure carries its own index
  auto plan2 = pddl::parse_plan("(move kitchen hall)\n(pick mop_1 kitchen)\n", dom);
  REQUIRE(plan2.ok());
  auto report2 = validate_plan(dom, prob, plan2.value());
  CHECK(!report2.ok);
  CHECK(report2.items.front().message.find("step 2 (pick mop_1 kitchen)") != std::string::npos);
  CHECK(report2.items.front().message.find("precondition (robot-at kitchen) unsatisfied") !=
        std::string::npos);
}

TEST_CASE("validate_plan replays a four-step fetch and matches a manual replay") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, kMoveMopProblem);
  auto plan = pddl::parse_plan(
      "(move kitchen hall)\n(pick mop_1 hall)\n(move hall kitchen)\n(drop mop_1 kitchen)\n", dom);
  REQUIRE(plan.ok());
  auto report = validate_plan(dom, prob, plan.value());
  CHECK(report.ok);
  REQUIRE(report.final_state.has_value());
  // hand-computed: robot back in kitchen, mop in kitchen, hand free
  std::vector<std::string> expected = {"at mop_1 kitchen", "hand-free", "robot-at kitchen"};
  CHECK(*report.final_state == expected);
}

TEST_CASE("delete-then-add: an action that deletes and adds the same atom keeps it") {
  auto dom = pddl::parse_domain(R"(
    (define (domain churn)
      (:requirements :strips)
      (:predicates (token) (done))
      (:action churn
        :parameters ()
        :precondition (token)
        :effect (and (not (token)) (token) (done)))))");
  REQUIRE(dom.ok());
  auto prob = pddl::parse_problem(R"(
    (define (problem churn_once) (:domain churn)
      (:init (token)) (:goal (and (done) (token)))))", dom.value());
  REQUIRE(prob.ok());
  auto plan = pddl::parse_plan("(churn)\n", dom.value());
  REQUIRE(plan.ok());
  auto report = validate_plan(dom.value(), prob.value(), plan.value());
  CHECK(report.ok);  // add wins over delete of the same atom
}

TEST_CASE("quantified goals are evaluated by expansion over typed objects") {
  auto dom = pddl::parse_domain(R"(
    (define (domain boxes)
      (:requirements :strips :typing :universal-preconditions)
      (:types box - object)
      (:predicates (empty ?b - box))
      (:action clear :parameters (?b - box) :precondition (and) :effect (empty ?b))))");
  REQUIRE(dom.ok());
  auto prob = pddl::parse_problem(R"(
    (define (problem clear_all) (:domain boxes)
      (:objects b1 b2 - box) (:init (empty b1))
      (:goal (forall (?b - box) (empty ?b)))))", dom.value());
  REQUIRE(prob.ok());

  auto failing = validate_plan(dom.value(), prob.value(), pddl::Plan{});
  CHECK(!failing.ok);
  CHECK(failing.items.front().message.find("(empty b2)") != std::string::npos);

  auto plan = pddl::parse_plan("(clear b2)\n", dom.value());
  REQUIRE(plan.ok());
  CHECK(validate_plan(dom.value(), prob.value(), plan.value()).ok);
}

TEST_CASE("ok is equivalent to zero error items") {
  auto dom = tidy_domain();
  auto prob = tidy_problem(dom, kMoveMopProblem);
  for (const auto& report :
       {instantiate_check(dom, prob), validate_plan(dom, prob, pddl::Plan{})}) {
    CHECK(report.ok == (report.error_count() == 0));
    CHECK(report.final_state.has_value() == report.ok);
  }
}

TEST_CASE("render_feedback is deterministic, errors first") {
  ValidationReport report;
  report.add_warning(FeedbackSource::instantiate, "w1");
  report.add_error(FeedbackSource::validate, "e1", 3);
  report.add_error(FeedbackSource::grounding, "symbol 'table_99' not found in scene", 0);
  std::string text = render_feedback(report);
  std::string again = render_feedback(report);
  CHECK(text == again);
  auto lines = split_lines(text);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "[validate] error: e1");
  CHECK(lines[1] == "[grounding] error: symbol 'table_99' not found in scene");
  CHECK(lines[2] == "[instantiate] warning: w1");

  ValidationReport ok_report;
  CHECK(render_feedback(ok_report) == "validation passed");
}
