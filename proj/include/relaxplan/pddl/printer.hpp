#pragma once

#include <string>

#include "relaxplan/pddl/ast.hpp"

namespace relaxplan::pddl {

// Deterministic canonical formatting. render is the inverse of the
// parser on its own output: parse(render(x)) == x, and re-rendering is
// byte-identical.

namespace detail {

/// Groups consecutive entries sharing a type: "?a ?b - room ?c - item".
inline std::string render_typed_list(const std::vector<TypedVar>& list) {
  std::string out;
  size_t i = 0;
  while (i < list.size()) {
    size_t j = i;
    while (j < list.size() && list[j].type == list[i].type) ++j;
    for (size_t k = i; k < j; ++k) {
      if (!out.empty()) out += " ";
      out += list[k].name;
    }
    out += " - " + list[i].type;
    i = j;
  }
  return out;
}

inline std::string render_literal(const Literal& l) {
  std::string atom = "(" + l.pred;
  for (const auto& a : l.args) atom += " " + a;
  atom += ")";
  return l.positive ? atom : "(not " + atom + ")";
}

inline std::string render_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::literal:
      return render_literal(f.lit);
    case Formula::Kind::equality: {
      std::string eq = "(= " + f.eq_lhs + " " + f.eq_rhs + ")";
      return f.eq_positive ? eq : "(not " + eq + ")";
    }
    case Formula::Kind::forall:
      return "(forall (" + f.var.name + " - " + f.var.type + ") " +
             render_formula(f.children[0]) + ")";
    case Formula::Kind::conj: {
      std::string out = "(and";
      for (const auto& c : f.children) out += " " + render_formula(c);
      out += ")";
      return out;
    }
  }
  return "()";
}

inline std::string render_effect(const std::vector<Literal>& eff) {
  if (eff.size() == 1) return render_literal(eff[0]);
  std::string out = "(and";
  for (const auto& l : eff) out += " " + render_literal(l);
  out += ")";
  return out;
}

}  // namespace detail

inline std::string render(const DomainAst& d) {
  std::string out = "(define (domain " + d.name + ")\n";
  if (!d.requirements.empty()) {
    out += "  (:requirements";
    for (const auto& r : d.requirements) out += " :" + r;
    out += ")\n";
  }
  if (!d.types.empty()) {
    out += "  (:types\n";
    size_t i = 0;
    while (i < d.types.size()) {
      size_t j = i;
      while (j < d.types.size() && d.types[j].parent == d.types[i].parent) ++j;
      out += "   ";
      for (size_t k = i; k < j; ++k) out += " " + d.types[k].name;
      out += " - " + d.types[i].parent + "\n";
      i = j;
    }
    out += "  )\n";
  }
  if (!d.predicates.empty()) {
    out += "  (:predicates\n";
    for (const auto& p : d.predicates) {
      out += "    (" + p.name;
      if (!p.params.empty()) out += " " + detail::render_typed_list(p.params);
      out += ")\n";
    }
    out += "  )\n";
  }
  for (const auto& a : d.actions) {
    out += "  (:action " + a.name + "\n";
    out += "    :parameters (" + detail::render_typed_list(a.params) + ")\n";
    out += "    :precondition " + detail::render_formula(a.precondition) + "\n";
    out += "    :effect " + detail::render_effect(a.effect) + "\n";
    out += "  )\n";
  }
  out += ")\n";
  return out;
}

inline std::string render(const ProblemAst& p) {
  std::string out = "(define (problem " + p.name + ")\n";
  out += "  (:domain " + p.domain_name + ")\n";
  if (!p.objects.empty()) {
    out += "  (:objects\n";
    size_t i = 0;
    while (i < p.objects.size()) {
      size_t j = i;
      while (j < p.objects.size() && p.objects[j].type == p.objects[i].type) ++j;
      out += "   ";
      for (size_t k = i; k < j; ++k) out += " " + p.objects[k].name;
      out += " - " + p.objects[i].type + "\n";
      i = j;
    }
    out += "  )\n";
  }
  out += "  (:init\n";
  for (const auto& l : p.init) out += "    " + detail::render_literal(l) + "\n";
  out += "  )\n";
  out += "  (:goal " + detail::render_formula(p.goal) + ")\n";
  out += ")\n";
  return out;
}

inline std::string render(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) out += s.to_string() + "\n";
  return out;
}

}  // namespace relaxplan::pddl
