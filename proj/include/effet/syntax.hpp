#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "effet/errors.hpp"

namespace effet {

/// Identifiers are nonempty strings over [a-zA-Z0-9_']; distinct strings
/// are distinct identifiers.
using Ident = std::string;

bool is_valid_ident(const Ident& s);

/// An effect annotation: either a finite set of operation names, or the
/// erased sentinel carried by unannotated arrows. The sentinel never takes
/// part in unions or subset tests on the refined side.
class Effect {
 public:
  Effect() = default;  // empty set
  static Effect empty() { return Effect(); }
  static Effect top();
  static Effect of(std::vector<Ident> ops);

  bool is_top() const { return top_; }
  const std::vector<Ident>& ops() const;  // sorted; invalid on top
  bool contains(const Ident& op) const;
  bool subset_of(const Effect& o) const;
  Effect union_with(const Effect& o) const;
  Effect with(const Ident& op) const;
  std::size_t size() const;
  bool empty_set() const { return !top_ && ops_.empty(); }

  bool operator==(const Effect& o) const {
    return top_ == o.top_ && ops_ == o.ops_;
  }
  bool operator!=(const Effect& o) const { return !(*this == o); }
  bool operator<(const Effect& o) const;
  std::string str() const;  // "{get,set}" / "{}" / "<erased>"

 private:
  bool top_ = false;
  std::vector<Ident> ops_;
};

class TypeExpr {
 public:
  enum class Kind { Base, Unit, Prod, Empty, Sum, Arrow };
  struct Node;

  TypeExpr() = default;
  static TypeExpr base(Ident name);
  static TypeExpr unit();
  static TypeExpr prod(TypeExpr a, TypeExpr b);
  static TypeExpr empty();
  static TypeExpr sum(TypeExpr a, TypeExpr b);
  static TypeExpr arrow(TypeExpr a, Effect eff, TypeExpr b);

  bool valid() const { return n_ != nullptr; }
  Kind kind() const;
  const Ident& base_name() const;
  TypeExpr left() const;   // Prod/Sum/Arrow argument
  TypeExpr right() const;  // Prod/Sum/Arrow result
  const Effect& arrow_eff() const;

  /// Ground types are exactly those with no Arrow anywhere (grammar G).
  bool is_ground() const;

  bool operator==(const TypeExpr& o) const;
  bool operator!=(const TypeExpr& o) const { return !(*this == o); }
  std::string str() const;

 private:
  std::shared_ptr<const Node> n_;
};

/// Replaces every arrow annotation with the erased sentinel. Idempotent and
/// the identity on annotation-free (in particular ground) types.
TypeExpr erase_type(const TypeExpr& a);

class Term {
 public:
  enum class Kind {
    Const,
    OpApp,
    Var,
    Unit,
    Pair,
    Fst,
    Snd,
    Absurd,
    Inl,
    Inr,
    Case,
    Lam,
    App,
    Ascribe
  };
  struct Node;

  Term() = default;
  static Term cnst(Ident c);
  static Term op_app(Ident op, Term m);
  static Term var(Ident x);
  static Term unit_val();
  static Term pair(Term m, Term n);
  static Term fst(Term m);
  static Term snd(Term m);
  static Term absurd(Term m);
  static Term inl(Term m);
  static Term inr(Term m);
  static Term case_of(Term m, Ident x, Term n1, Ident y, Term n2);
  static Term lam(Ident x, TypeExpr a, Term m);
  static Term app(Term m, Term n);
  static Term ascribe(Term m, TypeExpr a, Effect eff);

  bool valid() const { return n_ != nullptr; }
  Kind kind() const;
  const Ident& name() const;          // Const/OpApp/Var + binders
  const Ident& binder2() const;       // Case second binder
  Term child(std::size_t i) const;    // positional subterms
  std::size_t child_count() const;
  const TypeExpr& type_ann() const;   // Lam/Ascribe
  const Effect& eff_ann() const;      // Ascribe

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  std::string str() const;

 private:
  std::shared_ptr<const Node> n_;
  friend Term mk_term_node(Node n);
};

struct Signature {
  std::vector<Ident> base_types;  // sorted
  std::map<Ident, std::pair<TypeExpr, TypeExpr>> operations;  // op -> (arg, res)
  std::map<Ident, TypeExpr> constants;

  bool has_base(const Ident& b) const;
  bool has_op(const Ident& op) const;
  bool has_const(const Ident& c) const;
  /// Enforces the well-formedness invariants: ground operation types over
  /// declared bases, constant types over declared bases and declared ops.
  void validate() const;
  Effect full_effect() const;
};

/// Parses the concrete grammar. `let x = N in M` desugars to an application
/// of an annotated lambda, with the annotation inferred from N, so parsing
/// may surface typing errors for let bodies it cannot infer.
Term parse_term(const std::string& text, const Signature& sig);
TypeExpr parse_type(const std::string& text, const Signature& sig);

std::string print_term(const Term& m);
std::string print_type(const TypeExpr& a);

std::set<Ident> free_vars(const Term& m);
/// Capture-avoiding substitution of n for x in m.
Term subst(const Term& m, const Ident& x, const Term& n);
Ident fresh_name(const Ident& base, const std::set<Ident>& avoid);

}  // namespace effet
