#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effet/syntax.hpp"

namespace effet {

/// A typing context: ordered (insertion-ordered) bindings with the usual
/// shadowing discipline; lookup finds the rightmost binding.
class Context {
 public:
  Context() = default;
  Context extended(const Ident& x, const TypeExpr& a) const;
  std::optional<TypeExpr> lookup(const Ident& x) const;
  const std::vector<std::pair<Ident, TypeExpr>>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }
  std::string str() const;

 private:
  std::vector<std::pair<Ident, TypeExpr>> entries_;
};

struct Judgment {
  Context ctx;
  Term term;
  TypeExpr type;
  Effect eff;  // Effect::top() marks an erased judgment
  std::string str() const;
};

/// Principal syntax-directed type-and-effect inference: returns the unique
/// type and the smallest effect at which the term is derivable. Sum
/// injections and absurd are only inferable under an ascription, which the
/// Ascribe term form provides.
std::pair<TypeExpr, Effect> infer(const Signature& sig, const Context& ctx,
                                  const Term& m);

/// Succeeds iff infer yields (a, e0) with e0 a subset of eps; the returned
/// judgment records eps (subeffect widening happens here only).
Judgment check(const Signature& sig, const Context& ctx, const Term& m,
               const TypeExpr& a, const Effect& eps);

/// Inference for the unrefined (annotation-erased) system: effects are
/// ignored and all type comparisons happen on erased types.
TypeExpr infer_unrefined(const Signature& sig, const Context& ctx,
                         const Term& m);

/// Erases annotations from context and type; the effect becomes the erased
/// sentinel. Erased judgments are always derivable in the unrefined system.
Judgment erase_judgment(const Judgment& j);

}  // namespace effet
