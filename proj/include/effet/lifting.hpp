#pragma once

#include <string>
#include <utility>
#include <vector>

#include "effet/config.hpp"
#include "effet/semantics.hpp"

namespace effet {

/// A binary relation between two finite sets, materialised as a canonical
/// sorted pair set (the injection into the product is implicit).
struct Rel {
  FinSetObj left, right;
  std::vector<std::pair<Elem, Elem>> pairs;  // sorted, unique

  static Rel diagonal(const FinSetObj& x);
  static Rel from_pairs(FinSetObj left, FinSetObj right,
                        std::vector<std::pair<Elem, Elem>> pairs);
  bool contains(const Elem& a, const Elem& b) const;
  std::size_t size() const { return pairs.size(); }
};

/// The free lifting of the paired monad (T_eps, T) at a relation R: the
/// least pair set containing the unit images of R and closed under the
/// paired operation rule for the eps-generics.
struct LiftedCarrier {
  Effect eps;
  Rel base;
  std::vector<std::pair<Elem, Elem>> pairs;  // sorted, unique
  int rounds = 0;
  bool contains(const Elem& a, const Elem& b) const;
};

LiftedCarrier free_lift(const GradedFamily& fam, const Effect& eps,
                        const Rel& r);

/// Post-hoc re-check of the two closure conditions on a computed lifting
/// (or any candidate pair set); returns an explanation on failure.
bool check_lift_closure(const GradedFamily& fam, const Effect& eps,
                        const Rel& r,
                        const std::vector<std::pair<Elem, Elem>>& pairs,
                        std::string* why);

struct MonoLemmaReport {
  bool pass = false;
  std::size_t pairs_checked = 0;
  std::string detail;
};

/// Checks that every pair in the free lifting of the diagonal at X
/// satisfies f2 = mono(f1): since graded carriers are canonical subsets,
/// mono is the identity on representations and the check is f2 == f1.
MonoLemmaReport verify_mono_lemma(const GradedFamily& fam, const Effect& eps,
                                  const FinSetObj& x);

struct CompletenessCase {
  Term m, n;
  TypeExpr type;
  Effect eps;
  bool refined_equal = false;
  bool unrefined_equal = false;
  bool biconditional = false;
};

struct CompletenessReport {
  std::vector<CompletenessCase> cases;
  std::size_t equal_count = 0;
  std::size_t unequal_count = 0;
  bool all_ok = true;
};

/// For each closed ground-type pair, computes refined and unrefined table
/// equality and asserts the biconditional (soundness from injectivity of
/// the mono, completeness from the lifting lemma).
CompletenessReport verify_completeness(
    const ModelContext& mc, const std::vector<std::pair<Term, Term>>& corpus);

}  // namespace effet
