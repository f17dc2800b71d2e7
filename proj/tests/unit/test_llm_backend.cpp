#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "relaxplan/orchestrator.hpp"
#include "relaxplan/semantic/llm_backend.hpp"

using namespace relaxplan;

namespace {

// Canned-response endpoint: hands out the queued replies in order and
// records every request body for inspection.
class ReplayServer {
 public:
  explicit ReplayServer(std::vector<std::string> replies) : replies_(std::move(replies)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      size_t i = request_count_.fetch_add(1);
      bodies_.push_back(req.body);
      if (i < replies_.size() && replies_[i] == "__STATUS_500__") {
        res.status = 500;
        res.set_content("internal error", "text/plain");
        return;
      }
      std::string content = i < replies_.size() ? replies_[i] : "";
      nlohmann::json doc = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(doc.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ReplayServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  size_t requests() const { return request_count_.load(); }
  const std::vector<std::string>& bodies() const { return bodies_; }

 private:
  httplib::Server server_;
  std::vector<std::string> replies_;
  std::vector<std::string> bodies_;
  std::atomic<size_t> request_count_{0};
  std::thread thread_;
  int port_ = 0;
};

LlmConfig config_for(const ReplayServer& server) {
  LlmConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.model = "test-model";
  cfg.prompt_dir = std::string(RELAXPLAN_DATA_DIR) + "/prompts";
  cfg.api_key = "test-key";
  return cfg;
}

DistilledScene tiny_scene() {
  DistilledScene scene;
  scene.scene_id = "s";
  scene.room_ids = {"hall", "kitchen"};
  scene.entries = {{"mop_1", "kitchen", "a mop"}};
  return scene;
}

const char* kDomainReply = R"(Here is the domain you asked for.
```
(define (domain replay)
  (:requirements :strips :typing)
  (:types room - object)
  (:predicates (robot-at ?r - room))
  (:action move
    :parameters (?a - room ?b - room)
    :precondition (robot-at ?a)
    :effect (and (not (robot-at ?a)) (robot-at ?b))))
```
Good luck!)";

}  // namespace

TEST_CASE("recorded-response replay: domain generation parses the fenced payload") {
  ReplayServer server({kDomainReply});
  LlmBackend backend(config_for(server));
  auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "a robot");
  REQUIRE(dom.ok());
  CHECK(dom.value().name == "replay");
  CHECK(server.requests() == 1);

  // request carried the configured model and temperature 0
  auto body = nlohmann::json::parse(server.bodies()[0]);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"].get<double>() == 0.0);
  std::string prompt = body["messages"][1]["content"].get<std::string>();
  CHECK(prompt.find("mop_1 | kitchen | a mop") != std::string::npos);
  CHECK(prompt.find("a robot") != std::string::npos);
}

TEST_CASE("unparseable replies are re-prompted with the failure quoted") {
  ReplayServer server({"no code block here at all", kDomainReply});
  LlmBackend backend(config_for(server));
  auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "a robot");
  REQUIRE(dom.ok());
  CHECK(server.requests() == 2);
  auto second = nlohmann::json::parse(server.bodies()[1]);
  std::string prompt = second["messages"][1]["content"].get<std::string>();
  CHECK(prompt.find("could not be used") != std::string::npos);
  CHECK(prompt.find("no fenced code block") != std::string::npos);
}

TEST_CASE("reply without a pddl payload is unparseable; retries are bounded") {
  LlmConfig single;
  {
    ReplayServer server({"plain text"});
    single = config_for(server);
    single.max_attempts = 1;
    LlmBackend backend(single);
    auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "d");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::unparseable_output);
    CHECK(dom.error().message.find("plain text") != std::string::npos);  // raw retained
  }
  {
    ReplayServer server({"bad 1", "bad 2", "bad 3", "bad 4"});
    LlmConfig cfg = config_for(server);
    cfg.max_attempts = 4;
    LlmBackend backend(cfg);
    auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "d");
    REQUIRE(!dom.ok());
    CHECK(dom.code() == ErrCode::retries_exhausted);
    CHECK(server.requests() == 4);  // one try plus three re-prompts
  }
}

TEST_CASE("http failures surface as BackendError") {
  ReplayServer server({"__STATUS_500__"});
  LlmBackend backend(config_for(server));
  auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "d");
  REQUIRE(!dom.ok());
  CHECK(dom.code() == ErrCode::backend);
  CHECK(dom.error().message.find("500") != std::string::npos);
}

TEST_CASE("goal shifting and possibility verdicts parse their payloads") {
  ReplayServer server({"```\nclean the floor with the sponge\n```",
                       "```\nno: there is no suitable tool in the scene\n```"});
  LlmBackend backend(config_for(server));

  GoalSpec goal{"clean the floor with the mop", std::nullopt, {1, 1}};
  auto shifted = backend.shift_goal(goal, tiny_scene());
  REQUIRE(shifted.ok());
  CHECK(shifted.value().text == "clean the floor with the sponge");
  CHECK(shifted.value().lineage.shift == 2);
  CHECK(shifted.value().lineage.relaxation == 1);

  auto verdict = backend.possibility_check(goal, tiny_scene());
  REQUIRE(verdict.ok());
  CHECK(!verdict.value().possible);
  CHECK(verdict.value().rationale.find("no suitable tool") != std::string::npos);
}

TEST_CASE("a second fenced block in the reply violates the contract") {
  ReplayServer server({"```\n(define (domain x))\n```\nand\n```\nextra\n```"});
  LlmConfig cfg = config_for(server);
  cfg.max_attempts = 1;
  LlmBackend backend(cfg);
  auto dom = backend.gen_domain({"goal", std::nullopt, {0, 0}}, tiny_scene(), "d");
  REQUIRE(!dom.ok());
  CHECK(dom.error().message.find("more than one fenced code block") != std::string::npos);
}

TEST_CASE("the orchestrator runs unchanged over the http backend") {
  // a two-reply session: domain, then a problem that grounds immediately
  const char* problem_reply = R"(```
(define (problem replay_task)
  (:domain replay)
  (:objects hall kitchen - room)
  (:init (robot-at hall))
  (:goal (robot-at kitchen)))
```)";
  ReplayServer server({kDomainReply, problem_reply});
  LlmBackend backend(config_for(server));
  SolveConfig cfg;
  auto result = solve(backend, "go to the kitchen", tiny_scene(), "a mobile robot",
                      std::nullopt, cfg);
  REQUIRE(result.ok());
  const SolveResult& r = result.value();
  CHECK(r.grounded());
  CHECK(r.trace.steps.size() == 1);
  CHECK(r.trace.total_relaxations == 0);
  REQUIRE(r.plan.has_value());
  REQUIRE(r.plan->steps.size() == 1);
  CHECK(r.plan->steps[0].to_string() == "(move hall kitchen)");
  CHECK(server.requests() == 2);
}
