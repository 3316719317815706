#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "effet/monad.hpp"

namespace effet {

std::size_t saturation_limit();
void set_saturation_limit(std::size_t n);

/// A term of the free eps-monad over X: a leaf, or an operation applied to
/// an argument point with a total continuation over the result object.
class FreeTerm {
 public:
  struct Node;

  static FreeTerm leaf(Elem x);
  /// kont is aligned with the canonical order of the operation's result
  /// object.
  static FreeTerm node(Ident op, Elem arg, std::vector<FreeTerm> kont);

  bool is_leaf() const;
  const Elem& leaf_value() const;
  const Ident& op() const;
  const Elem& arg() const;
  const std::vector<FreeTerm>& kont() const;
  int depth() const;

  bool operator==(const FreeTerm& o) const;
  static int cmp(const FreeTerm& a, const FreeTerm& b);
  bool operator<(const FreeTerm& o) const { return cmp(*this, o) < 0; }
  std::string str() const;

 private:
  std::shared_ptr<const Node> n_;
};

/// All free terms over eps and X of depth <= depth, deduplicated and in
/// canonical order. Counts grow doubly exponentially; the size limit guards
/// runaway depths.
std::vector<FreeTerm> enumerate_free_terms(const MonadModel& t,
                                           const Effect& eps,
                                           const FinSetObj& x, int depth);

/// The fold of a free term into the model: leaves via unit, nodes via
/// bind(generic(op) at the argument, interpreted continuation). This is the
/// component at X of the unique eps-monad morphism out of the free monad.
Elem interpret_free_term(const MonadModel& t, const FinSetObj& x,
                         const FreeTerm& term);

/// The graded carrier T_eps X: the canonical subset of T X obtained by
/// saturating the units under the eps-generic effects, together with the
/// restricted unit table. The subset equals the image of the initial
/// morphism out of the free eps-monad.
class GradedCarrier {
 public:
  GradedCarrier(Effect eps, FinSetObj base, FinSetObj subset, FinFn unit_fn,
                int rounds)
      : eps_(std::move(eps)), base_(std::move(base)),
        subset_(std::move(subset)), unit_fn_(std::move(unit_fn)),
        rounds_(rounds) {}

  const Effect& eps() const { return eps_; }
  const FinSetObj& base() const { return base_; }
  /// The carrier as a canonical object; its elements are elements of T X.
  const FinSetObj& subset() const { return subset_; }
  const FinFn& unit_fn() const { return unit_fn_; }
  int rounds() const { return rounds_; }
  bool contains(const Elem& e) const { return subset_.contains(e); }

  /// The inclusion into a materialised T X table; raises SizeLimitExceeded
  /// when the ambient carrier cannot be represented.
  FinFn mono_fn(const MonadModel& t) const;

 private:
  Effect eps_;
  FinSetObj base_;
  FinSetObj subset_;
  FinFn unit_fn_;
  int rounds_;
};

/// Least subset of T X containing the units and closed under binding the
/// eps-generics against continuations into the subset. Saturation runs over
/// the finite lattice of subsets, so it reaches the least fixpoint without
/// any transfinite machinery.
GradedCarrier image_fixpoint(const MonadModel& t, const Effect& eps,
                             const FinSetObj& x);

/// Memoising access to the graded family T_eps, with the structure maps
/// restricted to the computed subsets.
class GradedFamily {
 public:
  explicit GradedFamily(std::shared_ptr<const MonadModel> t)
      : t_(std::move(t)) {}

  const MonadModel& model() const { return *t_; }
  std::shared_ptr<const MonadModel> model_ptr() const { return t_; }

  const GradedCarrier& carrier(const Effect& eps, const FinSetObj& x) const;

  /// The inclusion T_eps X -> T_eps' X for eps a subset of eps'. Containment
  /// of the underlying subsets is a theorem; its failure is an engine bug.
  FinFn inclusion(const Effect& eps, const Effect& eps2,
                  const FinSetObj& x) const;

  /// Bind restricted to the graded family; asserts closure.
  Elem graded_bind(const Effect& eps, const FinSetObj& x, const FinSetObj& y,
                   const Elem& t, const ElemFn& k) const;

  /// True iff left-first and right-first sequencing agree as tables
  /// T_eps X * T_eps Y -> T_eps (X * Y).
  bool check_commutative(const Effect& eps, const FinSetObj& x,
                         const FinSetObj& y, std::string* witness) const;

 private:
  std::shared_ptr<const MonadModel> t_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<Effect, FinSetObj>,
                   std::shared_ptr<const GradedCarrier>,
                   bool (*)(const std::pair<Effect, FinSetObj>&,
                            const std::pair<Effect, FinSetObj>&)>
      cache_{&GradedFamily::key_less};
  static bool key_less(const std::pair<Effect, FinSetObj>& a,
                       const std::pair<Effect, FinSetObj>& b);
};

/// Law suite for a computed graded carrier: unit/assoc laws of the induced
/// structure, closure of the restricted maps, the mono being a strong monad
/// morphism, and the factorisation of the generics.
LawReport check_graded_laws(const GradedFamily& fam, const Effect& eps,
                            const FinSetObj& x, const FinSetObj& y);

}  // namespace effet
