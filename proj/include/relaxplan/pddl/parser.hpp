#pragma once

#include <set>
#include <string>
#include <vector>

#include "relaxplan/error.hpp"
#include "relaxplan/pddl/ast.hpp"
#include "relaxplan/text.hpp"

namespace relaxplan::pddl {

// Recursive-descent reader for the PDDL 1.2 subset:
//   :strips :typing :negative-preconditions :universal-preconditions :equality
// Anything outside the subset is rejected with UnsupportedFeature rather
// than silently accepted. Input is case-insensitive; symbols are stored
// lowercase. ';' starts a comment running to end of line.

namespace detail {

struct SNode {
  bool is_atom = false;
  std::string atom;
  std::vector<SNode> items;
  int line = 1;
  int col = 1;
};

struct Token {
  enum class Kind { lparen, rparen, symbol, end };
  Kind kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    if (pos_ >= text_.size()) return {Token::Kind::end, "", line_, col_};
    int l = line_, c = col_;
    char ch = text_[pos_];
    if (ch == '(') {
      advance();
      return {Token::Kind::lparen, "(", l, c};
    }
    if (ch == ')') {
      advance();
      return {Token::Kind::rparen, ")", l, c};
    }
    std::string sym;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      sym.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return {Token::Kind::symbol, sym, l, c};
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline Error syntax_error(int line, int col, const std::string& expected) {
  Error e{ErrCode::syntax,
          std::to_string(line) + ":" + std::to_string(col) + ": expected " + expected};
  e.line = line;
  e.col = col;
  return e;
}

inline Error unsupported(const std::string& feature, int line) {
  Error e{ErrCode::unsupported_feature,
          "line " + std::to_string(line) + ": unsupported feature '" + feature + "'"};
  e.line = line;
  return e;
}

/// Reads one complete s-expression; trailing content is an error.
inline Result<SNode> read_sexpr(std::string_view text) {
  Lexer lex(text);
  std::vector<SNode> stack;
  SNode root;
  bool have_root = false;
  for (;;) {
    Token t = lex.next();
    if (t.kind == Token::Kind::end) {
      if (!stack.empty()) return syntax_error(t.line, t.col, "')'");
      if (!have_root) return syntax_error(t.line, t.col, "'('");
      return root;
    }
    if (have_root && stack.empty()) return syntax_error(t.line, t.col, "end of input");
    if (t.kind == Token::Kind::lparen) {
      SNode n;
      n.line = t.line;
      n.col = t.col;
      stack.push_back(std::move(n));
    } else if (t.kind == Token::Kind::rparen) {
      if (stack.empty()) return syntax_error(t.line, t.col, "'('");
      SNode done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        root = std::move(done);
        have_root = true;
      } else {
        stack.back().items.push_back(std::move(done));
      }
    } else {
      SNode n;
      n.is_atom = true;
      n.atom = t.text;
      n.line = t.line;
      n.col = t.col;
      if (stack.empty()) return syntax_error(t.line, t.col, "'('");
      stack.back().items.push_back(std::move(n));
    }
  }
}

inline bool head_is(const SNode& n, const std::string& kw) {
  return !n.is_atom && !n.items.empty() && n.items[0].is_atom && n.items[0].atom == kw;
}

/// Parses "a b - t c - u d" into typed entries; untyped names get "object".
inline Result<std::vector<TypedVar>> parse_typed_list(const std::vector<SNode>& items,
                                                      size_t begin, size_t end) {
  std::vector<TypedVar> out;
  std::vector<std::string> pending;
  for (size_t i = begin; i < end; ++i) {
    const SNode& n = items[i];
    if (!n.is_atom) return syntax_error(n.line, n.col, "a name in typed list");
    if (n.atom == "-") {
      if (i + 1 >= end || !items[i + 1].is_atom)
        return syntax_error(n.line, n.col, "a type name after '-'");
      if (pending.empty()) return syntax_error(n.line, n.col, "names before '-'");
      const std::string& type = items[i + 1].atom;
      for (auto& name : pending) out.push_back({std::move(name), type});
      pending.clear();
      ++i;
    } else {
      pending.push_back(n.atom);
    }
  }
  for (auto& name : pending) out.push_back({std::move(name), "object"});
  return out;
}

inline Result<Literal> parse_atom_literal(const SNode& n) {
  if (n.is_atom || n.items.empty() || !n.items[0].is_atom)
    return syntax_error(n.line, n.col, "a predicate atom");
  Literal lit;
  lit.pred = n.items[0].atom;
  for (size_t i = 1; i < n.items.size(); ++i) {
    if (!n.items[i].is_atom) return syntax_error(n.items[i].line, n.items[i].col, "a term");
    lit.args.push_back(n.items[i].atom);
  }
  return lit;
}

// Goal descriptions: atom | (not atom) | (not (= a b)) | (= a b) |
// (and GD*) | (forall (?v - t) GD). Everything else is outside the subset.
inline Result<Formula> parse_gd(const SNode& n, bool allow_forall) {
  if (n.is_atom) return syntax_error(n.line, n.col, "a goal description");
  if (n.items.empty()) return Formula::make_conj({});  // "()" treated as empty conjunction
  if (!n.items[0].is_atom) return syntax_error(n.line, n.col, "an operator or predicate");
  const std::string& head = n.items[0].atom;

  if (head == "or" || head == "imply" || head == "exists" || head == "when")
    return unsupported(head, n.line);

  if (head == "and") {
    std::vector<Formula> children;
    for (size_t i = 1; i < n.items.size(); ++i) {
      auto sub = parse_gd(n.items[i], allow_forall);
      if (!sub.ok()) return sub.error();
      children.push_back(std::move(sub).take());
    }
    return Formula::make_conj(std::move(children));
  }
  if (head == "=") {
    if (n.items.size() != 3 || !n.items[1].is_atom || !n.items[2].is_atom)
      return syntax_error(n.line, n.col, "(= term term)");
    return Formula::make_equality(n.items[1].atom, n.items[2].atom, true);
  }
  if (head == "not") {
    if (n.items.size() != 2) return syntax_error(n.line, n.col, "(not <atom>)");
    const SNode& inner = n.items[1];
    if (head_is(inner, "=")) {
      if (inner.items.size() != 3 || !inner.items[1].is_atom || !inner.items[2].is_atom)
        return syntax_error(inner.line, inner.col, "(= term term)");
      return Formula::make_equality(inner.items[1].atom, inner.items[2].atom, false);
    }
    if (head_is(inner, "and") || head_is(inner, "forall") || head_is(inner, "not"))
      return unsupported("negation of a compound formula", n.line);
    auto lit = parse_atom_literal(inner);
    if (!lit.ok()) return lit.error();
    Literal l = std::move(lit).take();
    l.positive = false;
    return Formula::make_literal(std::move(l));
  }
  if (head == "forall") {
    if (!allow_forall) return unsupported("forall in this context", n.line);
    if (n.items.size() != 3 || n.items[1].is_atom)
      return syntax_error(n.line, n.col, "(forall (?v - type) <gd>)");
    auto vars = parse_typed_list(n.items[1].items, 0, n.items[1].items.size());
    if (!vars.ok()) return vars.error();
    if (vars.value().size() != 1)
      return unsupported("forall over more than one variable", n.line);
    TypedVar v = vars.value()[0];
    if (!is_variable(v.name)) return syntax_error(n.items[1].line, n.items[1].col, "a ?variable");
    auto body = parse_gd(n.items[2], allow_forall);
    if (!body.ok()) return body.error();
    return Formula::make_forall(std::move(v), std::move(body).take());
  }
  // plain atom
  auto lit = parse_atom_literal(n);
  if (!lit.ok()) return lit.error();
  return Formula::make_literal(std::move(lit).take());
}

inline Result<std::vector<Literal>> parse_effect(const SNode& n) {
  std::vector<Literal> out;
  auto one = [&](const SNode& e) -> Result<std::vector<Literal>> {
    if (head_is(e, "forall") || head_is(e, "when"))
      return unsupported(e.items[0].atom + " in effects", e.line);
    if (head_is(e, "not")) {
      if (e.items.size() != 2) return syntax_error(e.line, e.col, "(not <atom>)");
      if (head_is(e.items[1], "=")) return unsupported("equality in effects", e.line);
      auto lit = parse_atom_literal(e.items[1]);
      if (!lit.ok()) return lit.error();
      Literal l = std::move(lit).take();
      l.positive = false;
      out.push_back(std::move(l));
      return out;
    }
    if (head_is(e, "=")) return unsupported("equality in effects", e.line);
    auto lit = parse_atom_literal(e);
    if (!lit.ok()) return lit.error();
    out.push_back(std::move(lit).take());
    return out;
  };
  if (head_is(n, "and")) {
    for (size_t i = 1; i < n.items.size(); ++i) {
      auto r = one(n.items[i]);
      if (!r.ok()) return r.error();
    }
    return out;
  }
  return one(n);
}

inline void collect_free_vars(const Formula& f, std::set<std::string>& bound,
                              std::set<std::string>& free) {
  switch (f.kind) {
    case Formula::Kind::literal:
      for (const auto& a : f.lit.args)
        if (is_variable(a) && !bound.count(a)) free.insert(a);
      break;
    case Formula::Kind::conj:
      for (const auto& c : f.children) collect_free_vars(c, bound, free);
      break;
    case Formula::Kind::equality:
      for (const auto* t : {&f.eq_lhs, &f.eq_rhs})
        if (is_variable(*t) && !bound.count(*t)) free.insert(*t);
      break;
    case Formula::Kind::forall: {
      bool inserted = bound.insert(f.var.name).second;
      collect_free_vars(f.children[0], bound, free);
      if (inserted) bound.erase(f.var.name);
      break;
    }
  }
}

}  // namespace detail

inline const std::set<std::string>& supported_requirements() {
  static const std::set<std::string> reqs = {
      "strips", "typing", "negative-preconditions", "universal-preconditions", "equality"};
  return reqs;
}

inline Result<DomainAst> parse_domain(const std::string& text) {
  using namespace detail;
  auto rootr = read_sexpr(text);
  if (!rootr.ok()) return rootr.error();
  const SNode root = std::move(rootr).take();
  if (!head_is(root, "define") || root.items.size() < 2 || !head_is(root.items[1], "domain") ||
      root.items[1].items.size() != 2 || !root.items[1].items[1].is_atom)
    return syntax_error(root.line, root.col, "(define (domain <name>) ...)");

  DomainAst dom;
  dom.name = root.items[1].items[1].atom;

  std::set<std::string> reqset;
  for (size_t si = 2; si < root.items.size(); ++si) {
    const SNode& sec = root.items[si];
    if (sec.is_atom || sec.items.empty() || !sec.items[0].is_atom)
      return syntax_error(sec.line, sec.col, "a domain section");
    const std::string& kw = sec.items[0].atom;
    if (kw == ":requirements") {
      for (size_t i = 1; i < sec.items.size(); ++i) {
        if (!sec.items[i].is_atom)
          return syntax_error(sec.items[i].line, sec.items[i].col, "a requirement flag");
        std::string flag = sec.items[i].atom;
        if (!flag.empty() && flag[0] == ':') flag.erase(0, 1);
        if (!supported_requirements().count(flag))
          return unsupported(":" + flag, sec.items[i].line);
        reqset.insert(flag);
      }
    } else if (kw == ":types") {
      auto listed = parse_typed_list(sec.items, 1, sec.items.size());
      if (!listed.ok()) return listed.error();
      for (const auto& tv : listed.value()) dom.types.push_back({tv.name, tv.type});
    } else if (kw == ":predicates") {
      for (size_t i = 1; i < sec.items.size(); ++i) {
        const SNode& p = sec.items[i];
        if (p.is_atom || p.items.empty() || !p.items[0].is_atom)
          return syntax_error(p.line, p.col, "a predicate declaration");
        PredicateDecl decl;
        decl.name = p.items[0].atom;
        auto params = parse_typed_list(p.items, 1, p.items.size());
        if (!params.ok()) return params.error();
        decl.params = std::move(params).take();
        for (const auto& v : decl.params)
          if (!is_variable(v.name)) return syntax_error(p.line, p.col, "?variables as parameters");
        dom.predicates.push_back(std::move(decl));
      }
    } else if (kw == ":action") {
      if (sec.items.size() < 2 || !sec.items[1].is_atom)
        return syntax_error(sec.line, sec.col, "an action name");
      ActionSchema act;
      act.name = sec.items[1].atom;
      act.precondition = Formula::make_conj({});
      size_t i = 2;
      while (i < sec.items.size()) {
        if (!sec.items[i].is_atom)
          return syntax_error(sec.items[i].line, sec.items[i].col, "an action keyword");
        const std::string& akw = sec.items[i].atom;
        if (i + 1 >= sec.items.size())
          return syntax_error(sec.items[i].line, sec.items[i].col, "a value after " + akw);
        const SNode& val = sec.items[i + 1];
        if (akw == ":parameters") {
          if (val.is_atom) return syntax_error(val.line, val.col, "a parameter list");
          auto params = parse_typed_list(val.items, 0, val.items.size());
          if (!params.ok()) return params.error();
          act.params = std::move(params).take();
          for (const auto& v : act.params)
            if (!is_variable(v.name)) return syntax_error(val.line, val.col, "?variables");
        } else if (akw == ":precondition") {
          auto pre = parse_gd(val, /*allow_forall=*/true);
          if (!pre.ok()) return pre.error();
          act.precondition = std::move(pre).take();
        } else if (akw == ":effect") {
          auto eff = parse_effect(val);
          if (!eff.ok()) return eff.error();
          act.effect = std::move(eff).take();
        } else {
          return unsupported(akw + " in action", sec.items[i].line);
        }
        i += 2;
      }
      dom.actions.push_back(std::move(act));
    } else {
      return unsupported(kw, sec.line);
    }
  }
  dom.requirements.assign(reqset.begin(), reqset.end());

  // structural invariants
  std::set<std::string> seen;
  for (const auto& p : dom.predicates)
    if (!seen.insert(p.name).second)
      return make_error(ErrCode::syntax, "duplicate predicate '" + p.name + "'");
  seen.clear();
  for (const auto& t : dom.types)
    if (!seen.insert(t.name).second)
      return make_error(ErrCode::syntax, "duplicate type '" + t.name + "'");
  seen.clear();
  for (const auto& a : dom.actions)
    if (!seen.insert(a.name).second)
      return make_error(ErrCode::syntax, "duplicate action '" + a.name + "'");

  for (const auto& t : dom.types)
    if (t.parent != "object" && !dom.type_declared(t.parent))
      return make_error(ErrCode::unknown_type, "type '" + t.parent + "' undeclared");
  for (const auto& p : dom.predicates)
    for (const auto& v : p.params)
      if (!dom.type_declared(v.type))
        return make_error(ErrCode::unknown_type,
                          "type '" + v.type + "' undeclared in predicate '" + p.name + "'");
  for (const auto& a : dom.actions) {
    std::set<std::string> params;
    for (const auto& v : a.params) {
      if (!params.insert(v.name).second)
        return make_error(ErrCode::syntax,
                          "duplicate parameter '" + v.name + "' in action '" + a.name + "'");
      if (!dom.type_declared(v.type))
        return make_error(ErrCode::unknown_type,
                          "type '" + v.type + "' undeclared in action '" + a.name + "'");
    }
    std::set<std::string> bound, free;
    detail::collect_free_vars(a.precondition, bound, free);
    for (const auto& l : a.effect)
      for (const auto& arg : l.args)
        if (is_variable(arg)) free.insert(arg);
    for (const auto& v : free)
      if (!params.count(v))
        return make_error(ErrCode::syntax,
                          "variable '" + v + "' not bound in action '" + a.name + "'");
  }
  return dom;
}

inline Result<ProblemAst> parse_problem(const std::string& text, const DomainAst& domain) {
  using namespace detail;
  auto rootr = read_sexpr(text);
  if (!rootr.ok()) return rootr.error();
  const SNode root = std::move(rootr).take();
  if (!head_is(root, "define") || root.items.size() < 2 || !head_is(root.items[1], "problem") ||
      root.items[1].items.size() != 2 || !root.items[1].items[1].is_atom)
    return syntax_error(root.line, root.col, "(define (problem <name>) ...)");

  ProblemAst prob;
  prob.name = root.items[1].items[1].atom;
  prob.goal = Formula::make_conj({});

  for (size_t si = 2; si < root.items.size(); ++si) {
    const SNode& sec = root.items[si];
    if (sec.is_atom || sec.items.empty() || !sec.items[0].is_atom)
      return syntax_error(sec.line, sec.col, "a problem section");
    const std::string& kw = sec.items[0].atom;
    if (kw == ":domain") {
      if (sec.items.size() != 2 || !sec.items[1].is_atom)
        return syntax_error(sec.line, sec.col, "(:domain <name>)");
      prob.domain_name = sec.items[1].atom;
    } else if (kw == ":objects") {
      auto objs = parse_typed_list(sec.items, 1, sec.items.size());
      if (!objs.ok()) return objs.error();
      prob.objects = std::move(objs).take();
      for (const auto& o : prob.objects) {
        if (is_variable(o.name))
          return syntax_error(sec.line, sec.col, "constant names in :objects");
        if (!domain.type_declared(o.type))
          return make_error(ErrCode::unknown_type, "type '" + o.type + "' undeclared");
      }
    } else if (kw == ":init") {
      for (size_t i = 1; i < sec.items.size(); ++i) {
        if (head_is(sec.items[i], "not"))
          return unsupported("negative init literal", sec.items[i].line);
        if (head_is(sec.items[i], "="))
          return unsupported("equality in init", sec.items[i].line);
        auto lit = parse_atom_literal(sec.items[i]);
        if (!lit.ok()) return lit.error();
        Literal l = std::move(lit).take();
        const PredicateDecl* decl = domain.find_predicate(l.pred);
        if (!decl)
          return make_error(ErrCode::unknown_predicate, "undeclared predicate '" + l.pred + "'");
        if (decl->params.size() != l.args.size()) {
          return make_error(ErrCode::arity_mismatch,
                            "arity mismatch for predicate '" + l.pred + "': got " +
                                std::to_string(l.args.size()) + ", want " +
                                std::to_string(decl->params.size()));
        }
        for (const auto& a : l.args)
          if (is_variable(a))
            return syntax_error(sec.items[i].line, sec.items[i].col, "ground init literal");
        prob.init.push_back(std::move(l));
      }
    } else if (kw == ":goal") {
      if (sec.items.size() != 2) return syntax_error(sec.line, sec.col, "(:goal <gd>)");
      auto goal = parse_gd(sec.items[1], /*allow_forall=*/true);
      if (!goal.ok()) return goal.error();
      prob.goal = std::move(goal).take();
    } else {
      return unsupported(kw, sec.line);
    }
  }

  std::set<std::string> seen;
  for (const auto& o : prob.objects)
    if (!seen.insert(o.name).second)
      return make_error(ErrCode::syntax, "duplicate object '" + o.name + "'");

  // goal predicates must resolve against the domain
  std::vector<const Literal*> goal_lits;
  std::vector<const Formula*> stack{&prob.goal};
  while (!stack.empty()) {
    const Formula* f = stack.back();
    stack.pop_back();
    switch (f->kind) {
      case Formula::Kind::literal: goal_lits.push_back(&f->lit); break;
      case Formula::Kind::conj:
        for (const auto& c : f->children) stack.push_back(&c);
        break;
      case Formula::Kind::forall:
        if (!domain.type_declared(f->var.type))
          return make_error(ErrCode::unknown_type, "type '" + f->var.type + "' undeclared");
        stack.push_back(&f->children[0]);
        break;
      case Formula::Kind::equality: break;
    }
  }
  for (const Literal* l : goal_lits) {
    const PredicateDecl* decl = domain.find_predicate(l->pred);
    if (!decl)
      return make_error(ErrCode::unknown_predicate, "undeclared predicate '" + l->pred + "'");
    if (decl->params.size() != l->args.size())
      return make_error(ErrCode::arity_mismatch,
                        "arity mismatch for predicate '" + l->pred + "': got " +
                            std::to_string(l->args.size()) + ", want " +
                            std::to_string(decl->params.size()));
  }
  return prob;
}

inline Result<Plan> parse_plan(const std::string& text, const DomainAst& domain) {
  Plan plan;
  int lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string line = trim(raw);
    size_t semi = line.find(';');
    if (semi != std::string::npos) line = trim(line.substr(0, semi));
    if (line.empty()) continue;
    auto noder = detail::read_sexpr(line);
    if (!noder.ok()) {
      Error e = noder.error();
      e.line = lineno;
      e.message = "plan line " + std::to_string(lineno) + ": " + e.message;
      return e;
    }
    const detail::SNode node = std::move(noder).take();
    if (node.items.empty() || !node.items[0].is_atom)
      return detail::syntax_error(lineno, 1, "(action args...)");
    GroundAction step;
    step.name = node.items[0].atom;
    for (size_t i = 1; i < node.items.size(); ++i) {
      if (!node.items[i].is_atom) return detail::syntax_error(lineno, 1, "ground arguments");
      step.args.push_back(node.items[i].atom);
    }
    const ActionSchema* schema = domain.find_action(step.name);
    if (!schema)
      return make_error(ErrCode::unknown_action, "unknown action '" + step.name + "'");
    if (schema->params.size() != step.args.size())
      return make_error(ErrCode::arity_mismatch,
                        "arity mismatch for action '" + step.name + "': got " +
                            std::to_string(step.args.size()) + ", want " +
                            std::to_string(schema->params.size()));
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

}  // namespace relaxplan::pddl
