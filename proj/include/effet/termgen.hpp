#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "effet/config.hpp"
#include "effet/typing.hpp"

namespace effet {

/// Deterministic generator of well-typed closed terms over a standard
/// workbench config (state-style signature). Used by the property suites
/// and the completeness corpus.
class TermGen {
 public:
  TermGen(const ModelContext& mc, std::uint64_t seed);

  /// A closed term of the given ground type whose effect is within budget.
  Term ground_term(const TypeExpr& type, const Effect& budget, int depth);
  /// A random ground type of bounded depth over the config's base types.
  TypeExpr ground_type(int depth);
  /// A random effect below the signature's full effect.
  Effect effect_budget();

  /// Pairs for the completeness corpus: a mix of equal-by-construction
  /// pairs (let-expansion of pure values) and independent same-type pairs.
  std::vector<std::pair<Term, Term>> completeness_pairs(std::size_t n);

  /// Arbitrary well-scoped (not necessarily well-typed) closed terms, for
  /// parser/printer roundtrips.
  Term arbitrary_term(int depth);

 private:
  const ModelContext& mc_;
  std::mt19937_64 rng_;
  std::size_t pick(std::size_t n);
  bool coin(double p);
  Ident some_loc();
  Ident some_numeral();
};

}  // namespace effet
