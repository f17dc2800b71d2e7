#pragma once

#include <optional>
#include <string>
#include <vector>

namespace relaxplan::pddl {

// Symbols are stored lowercase. Variables keep their leading '?' so a
// term is self-describing: "?x" is a variable, "mop_1" a constant.

inline bool is_variable(const std::string& term) {
  return !term.empty() && term[0] == '?';
}

struct TypedVar {
  std::string name;  // without '?' for objects, with '?' for formula/action variables
  std::string type;

  bool operator==(const TypedVar&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedVar> params;

  bool operator==(const PredicateDecl&) const = default;
};

struct Literal {
  std::string pred;
  std::vector<std::string> args;
  bool positive = true;

  bool operator==(const Literal&) const = default;
};

/// Formula tree for the accepted subset: literals, conjunctions,
/// (in)equality atoms and universally quantified sub-formulas.
struct Formula {
  enum class Kind { literal, conj, equality, forall };

  Kind kind = Kind::conj;
  Literal lit;                     // kind == literal
  std::vector<Formula> children;   // kind == conj; forall body at children[0]
  std::string eq_lhs, eq_rhs;      // kind == equality
  bool eq_positive = true;
  TypedVar var;                    // kind == forall

  bool operator==(const Formula&) const = default;

  static Formula make_literal(Literal l) {
    Formula f;
    f.kind = Kind::literal;
    f.lit = std::move(l);
    return f;
  }
  static Formula make_conj(std::vector<Formula> children) {
    Formula f;
    f.kind = Kind::conj;
    f.children = std::move(children);
    return f;
  }
  static Formula make_equality(std::string lhs, std::string rhs, bool positive) {
    Formula f;
    f.kind = Kind::equality;
    f.eq_lhs = std::move(lhs);
    f.eq_rhs = std::move(rhs);
    f.eq_positive = positive;
    return f;
  }
  static Formula make_forall(TypedVar var, Formula body) {
    Formula f;
    f.kind = Kind::forall;
    f.var = std::move(var);
    f.children.push_back(std::move(body));
    return f;
  }
};

struct TypeDecl {
  std::string name;
  std::string parent;  // "object" when not stated

  bool operator==(const TypeDecl&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  Formula precondition;            // quantifiers allowed
  std::vector<Literal> effect;     // conjunction of add/delete literals

  bool operator==(const ActionSchema&) const = default;
};

struct DomainAst {
  std::string name;
  std::vector<std::string> requirements;  // canonical sorted, without ':'
  std::vector<TypeDecl> types;            // declaration order
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  bool operator==(const DomainAst&) const = default;

  const PredicateDecl* find_predicate(const std::string& name) const {
    for (const auto& p : predicates)
      if (p.name == name) return &p;
    return nullptr;
  }
  const ActionSchema* find_action(const std::string& name) const {
    for (const auto& a : actions)
      if (a.name == name) return &a;
    return nullptr;
  }
  bool type_declared(const std::string& t) const {
    if (t == "object") return true;
    for (const auto& d : types)
      if (d.name == t) return true;
    return false;
  }
  /// Walks the hierarchy; every type is a subtype of "object".
  bool is_subtype(const std::string& t, const std::string& ancestor) const {
    if (ancestor == "object" || t == ancestor) return true;
    std::string cur = t;
    for (int guard = 0; guard < 64; ++guard) {
      const TypeDecl* decl = nullptr;
      for (const auto& d : types)
        if (d.name == cur) { decl = &d; break; }
      if (!decl) return false;
      if (decl->parent == ancestor) return true;
      if (decl->parent == "object") return false;
      cur = decl->parent;
    }
    return false;
  }
};

struct ProblemAst {
  std::string name;
  std::string domain_name;
  std::vector<TypedVar> objects;  // name is a constant symbol here
  std::vector<Literal> init;      // ground, positive
  Formula goal;

  bool operator==(const ProblemAst&) const = default;

  const TypedVar* find_object(const std::string& name) const {
    for (const auto& o : objects)
      if (o.name == name) return &o;
    return nullptr;
  }
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const GroundAction&) const = default;

  std::string to_string() const {
    std::string s = "(" + name;
    for (const auto& a : args) s += " " + a;
    s += ")";
    return s;
  }
};

struct Plan {
  std::vector<GroundAction> steps;

  bool operator==(const Plan&) const = default;
};

}  // namespace relaxplan::pddl
