#pragma once

#include <optional>
#include <string>
#include <vector>

#include "effet/config.hpp"
#include "effet/typing.hpp"

namespace effet {

enum class Mode { Refined, Unrefined };

/// A denotation: the judgment together with the value table over the
/// context denotation. For closed terms the table has one entry. The
/// codomain carrier is not materialised; values are elements of T|A| (or
/// of the graded subset in refined mode, which shares the representation).
struct Denotation {
  Judgment j;
  Mode mode;
  FinSetObj dom;             // |Gamma|
  std::vector<Elem> values;  // aligned with dom.elems()
  Elem value() const;        // closed case; throws when |dom| != 1
};

/// Interprets a type; refined arrows denote exponentials into the graded
/// carriers, unrefined arrows erase first and use the base monad.
FinSetObj interp_type(const ModelContext& mc, const TypeExpr& a, Mode mode);
FinSetObj interp_context(const ModelContext& mc, const Context& ctx,
                         Mode mode);

/// Refined interpretation at the principal judgment (inferred on the fly);
/// values land in the graded carrier of the principal effect.
Denotation interp_refined(const ModelContext& mc, const Context& ctx,
                          const Term& m);
/// As the spec operation: validates the judgment against inference and
/// coerces into j.eff (the coercion is the subset inclusion).
Denotation interp_refined_at(const ModelContext& mc, const Judgment& j);

Denotation interp_unrefined(const ModelContext& mc, const Context& ctx,
                            const Term& m);

/// The refined element of a declared constant, derived from its unrefined
/// interpretation; throws IncompatibleConstant when the unrefined value
/// does not lie in the refined sub-carrier.
Elem interp_constant_refined(const ModelContext& mc, const Ident& c);
/// The unrefined element of a declared constant (a point of ||A||).
Elem interp_constant_unrefined(const ModelContext& mc, const Ident& c);

struct EquivResult {
  bool equal;
  Judgment jm, jn;
  std::string witness;  // present iff !equal
};

/// Table equality of the two closed terms' denotations at a common effect
/// (the union of the principal effects in refined mode).
EquivResult equiv(const ModelContext& mc, const Term& m, const Term& n,
                  Mode mode);

/// Human-readable path to the first structural difference of two elements.
std::string diff_witness(const Elem& a, const Elem& b);

}  // namespace effet
