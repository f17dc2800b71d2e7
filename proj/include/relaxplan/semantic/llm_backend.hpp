#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "relaxplan/pddl/parser.hpp"
#include "relaxplan/pddl/printer.hpp"
#include "relaxplan/semantic/backend.hpp"

namespace relaxplan {

// HTTP client for an OpenAI-compatible chat completions endpoint.
// Requests run at temperature 0. Every operator demands a reply with
// exactly one fenced code block carrying the payload; unparseable
// replies are re-prompted up to three times with the parse error quoted.

struct LlmConfig {
  std::string endpoint;    // e.g. http://127.0.0.1:8080
  std::string api_key;
  std::string model;
  std::string prompt_dir;  // directory holding the prompt template files
  double temperature = 0.0;
  int max_attempts = 4;    // first try + up to 3 re-prompts
  int timeout_seconds = 120;

  static LlmConfig from_env() {
    LlmConfig cfg;
    auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    cfg.endpoint = get("RELAXPLAN_LLM_ENDPOINT");
    cfg.api_key = get("RELAXPLAN_LLM_API_KEY");
    cfg.model = get("RELAXPLAN_LLM_MODEL");
    cfg.prompt_dir = get("RELAXPLAN_PROMPT_DIR");
    if (cfg.prompt_dir.empty()) cfg.prompt_dir = "data/prompts";
    return cfg;
  }
};

class LlmBackend : public SemanticBackend {
 public:
  explicit LlmBackend(LlmConfig cfg) : cfg_(std::move(cfg)) {}

  std::string name() const override { return "llm:" + cfg_.model; }

  Result<pddl::DomainAst> gen_domain(const GoalSpec& goal, const DistilledScene& scene,
                                     const std::string& domain_desc) override {
    auto prompt = build_prompt("gen_domain.txt",
                               {{"goal", goal.text},
                                {"scene", distilled_to_text(scene)},
                                {"desc", domain_desc},
                                {"example", read_optional("example_domain.txt")}});
    if (!prompt.ok()) return prompt.error();
    pddl::DomainAst out;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      auto parsed = pddl::parse_domain(payload);
      if (!parsed.ok()) return parsed.error();
      out = std::move(parsed).take();
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    return out;
  }

  Result<pddl::ProblemAst> gen_problem(const pddl::DomainAst& domain, const GoalSpec& goal,
                                       const DistilledScene& scene) override {
    auto prompt = build_prompt("gen_problem.txt",
                               {{"goal", goal.text},
                                {"scene", distilled_to_text(scene)},
                                {"domain", pddl::render(domain)},
                                {"example", read_optional("example_problem.txt")}});
    if (!prompt.ok()) return prompt.error();
    pddl::ProblemAst out;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      auto parsed = pddl::parse_problem(payload, domain);
      if (!parsed.ok()) return parsed.error();
      out = std::move(parsed).take();
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    return out;
  }

  Result<pddl::ProblemAst> refine(const pddl::ProblemAst& problem, const pddl::DomainAst& domain,
                                  const GoalSpec& goal, const DistilledScene& scene,
                                  const std::vector<FeedbackItem>& feedback) override {
    auto prompt = build_prompt("refine.txt",
                               {{"goal", goal.text},
                                {"scene", distilled_to_text(scene)},
                                {"domain", pddl::render(domain)},
                                {"problem", pddl::render(problem)},
                                {"feedback", render_feedback(feedback)}});
    if (!prompt.ok()) return prompt.error();
    pddl::ProblemAst out;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      auto parsed = pddl::parse_problem(payload, domain);
      if (!parsed.ok()) return parsed.error();
      out = std::move(parsed).take();
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    if (out == problem)
      return Error{ErrCode::no_progress, "refinement produced no structural change"};
    return out;
  }

  Result<GoalSpec> shift_goal(const GoalSpec& goal, const DistilledScene& scene) override {
    auto prompt = build_prompt("shift_goal.txt",
                               {{"goal", goal.text}, {"scene", distilled_to_text(scene)}});
    if (!prompt.ok()) return prompt.error();
    std::string text;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      std::string t = trim(payload);
      if (t.empty()) return make_error(ErrCode::unparseable_output, "empty goal text");
      text = t;
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    GoalSpec out = goal;
    out.formula.reset();
    out.text = text;
    out.lineage.shift += 1;
    return out;
  }

  Result<GoalSpec> relax_goal(const GoalSpec& goal, const DistilledScene& scene) override {
    auto prompt = build_prompt("relax_goal.txt",
                               {{"goal", goal.text}, {"scene", distilled_to_text(scene)}});
    if (!prompt.ok()) return prompt.error();
    std::string text;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      std::string t = trim(payload);
      if (t.empty()) return make_error(ErrCode::unparseable_output, "empty goal text");
      text = t;
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    GoalSpec out = goal;
    out.formula.reset();
    out.text = text;
    out.lineage.relaxation += 1;
    return out;
  }

  Result<PossibilityVerdict> possibility_check(const GoalSpec& goal,
                                               const DistilledScene& scene) override {
    auto prompt = build_prompt("possibility.txt",
                               {{"goal", goal.text}, {"scene", distilled_to_text(scene)}});
    if (!prompt.ok()) return prompt.error();
    PossibilityVerdict verdict;
    auto err = request_payload(prompt.value(), [&](const std::string& payload) -> Result<std::monostate> {
      std::string t = to_lower(trim(payload));
      if (starts_with(t, "yes"))
        verdict.possible = true;
      else if (starts_with(t, "no"))
        verdict.possible = false;
      else
        return make_error(ErrCode::unparseable_output, "expected yes/no verdict");
      verdict.rationale = trim(payload);
      return std::monostate{};
    });
    if (!err.ok()) return err.error();
    return verdict;
  }

 private:
  Result<std::string> build_prompt(const std::string& file,
                                   const std::vector<std::pair<std::string, std::string>>& subs) {
    std::ifstream in(cfg_.prompt_dir + "/" + file);
    if (!in)
      return Error{ErrCode::config, "prompt template missing: " + cfg_.prompt_dir + "/" + file};
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    for (const auto& [key, value] : subs) {
      std::string tag = "{{" + key + "}}";
      size_t pos;
      while ((pos = text.find(tag)) != std::string::npos) text.replace(pos, tag.size(), value);
    }
    return text;
  }

  std::string read_optional(const std::string& file) {
    std::ifstream in(cfg_.prompt_dir + "/" + file);
    if (!in) return "";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  /// The reply must contain exactly one ``` fenced block.
  static Result<std::string> extract_fenced(const std::string& content) {
    size_t first = content.find("```");
    if (first == std::string::npos)
      return make_error(ErrCode::unparseable_output, "no fenced code block in reply");
    size_t body = content.find('\n', first);
    if (body == std::string::npos)
      return make_error(ErrCode::unparseable_output, "unterminated code fence");
    size_t close = content.find("```", body);
    if (close == std::string::npos)
      return make_error(ErrCode::unparseable_output, "unterminated code fence");
    if (content.find("```", close + 3) != std::string::npos)
      return make_error(ErrCode::unparseable_output, "more than one fenced code block in reply");
    return content.substr(body + 1, close - body - 1);
  }

  Result<std::string> chat(const std::string& prompt) {
    if (cfg_.endpoint.empty())
      return Error{ErrCode::config, "no endpoint configured (RELAXPLAN_LLM_ENDPOINT)"};
    httplib::Client client(cfg_.endpoint);  // one client per call: safe under concurrency
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    nlohmann::json body = {
        {"model", cfg_.model},
        {"temperature", cfg_.temperature},
        {"messages",
         {{{"role", "system"},
           {"content",
            "You are a planning assistant that writes PDDL. Always answer with exactly one "
            "fenced code block containing only the requested payload."}},
          {{"role", "user"}, {"content", prompt}}}}};
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res)
      return Error{ErrCode::backend,
                   "transport error: " + httplib::to_string(res.error())};
    if (res->status != 200)
      return Error{ErrCode::backend, "endpoint returned status " + std::to_string(res->status) +
                                         ": " + res->body.substr(0, 200)};
    try {
      auto doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      return Error{ErrCode::backend, std::string("malformed endpoint reply: ") + ex.what()};
    }
  }

  /// Runs the prompt, extracting and consuming the fenced payload;
  /// re-prompts with the failure quoted when the payload will not parse.
  template <typename Consume>
  Result<std::monostate> request_payload(const std::string& prompt, const Consume& consume) {
    std::string current = prompt;
    std::string last_raw;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
      auto reply = chat(current);
      if (!reply.ok()) return reply.error();
      last_raw = reply.value();
      auto payload = extract_fenced(last_raw);
      Result<std::monostate> used =
          payload.ok() ? consume(payload.value()) : Result<std::monostate>(payload.error());
      if (used.ok()) return std::monostate{};
      if (used.code() == ErrCode::no_progress) return used.error();
      if (attempt == cfg_.max_attempts) {
        if (cfg_.max_attempts == 1)
          return Error{ErrCode::unparseable_output,
                       used.error().message + "; raw reply: " + last_raw.substr(0, 500)};
        return Error{ErrCode::retries_exhausted,
                     std::to_string(cfg_.max_attempts) + " attempts exhausted; last failure: " +
                         used.error().message + "; raw reply: " + last_raw.substr(0, 500)};
      }
      current = prompt +
                "\n\nYour previous reply could not be used: " + used.error().message +
                "\nReply again with exactly one fenced code block.";
    }
    return Error{ErrCode::retries_exhausted, "unreachable"};
  }

  LlmConfig cfg_;
};

}  // namespace relaxplan
