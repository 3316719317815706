#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "effet/finset.hpp"
#include "effet/syntax.hpp"

namespace effet {

/// A monoid on a finite carrier; laws are checked exhaustively on demand.
struct Monoid {
  FinSetObj carrier;
  Elem unit;
  FinFn mult;  // carrier * carrier -> carrier

  Elem times(const Elem& a, const Elem& b) const {
    return mult(Elem::pair(a, b));
  }
  /// Throws MonoidLawViolation with a witness on the first broken law.
  void check_laws() const;
};

/// The monoid of partial store overwrites on (1 + V)^Loc: unit is the
/// everywhere-unchanged store, and multiplication lets the right operand's
/// writes win componentwise.
Monoid overwriting_monoid(const FinSetObj& locs, const FinSetObj& values);

/// One interpreted signature operation: a generic effect |G| -> T|G'|.
struct GenericEffect {
  Ident op;
  FinSetObj arg;  // |G|
  FinSetObj res;  // |G'|
  ElemFn fn;      // a in |G|  |->  element of T|G'|
};

/// A strong monad on finite sets, presented elementwise so that huge
/// carriers never have to be materialised just to compute with their
/// elements. Object-level tables are built on demand for law checking and
/// raise SizeLimitExceeded when a carrier does not fit the budget.
class MonadModel {
 public:
  explicit MonadModel(std::string name) : name_(std::move(name)) {}
  virtual ~MonadModel() = default;

  const std::string& name() const { return name_; }

  /// The carrier T X as a canonical object (memoised).
  FinSetObj carrier(const FinSetObj& x) const;
  /// Number of elements of T X without building it, when finite and
  /// representable; nullopt when it overflows.
  virtual std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const = 0;
  /// Lazy enumeration of T X in canonical order, without materialising the
  /// object. Used by the law suites.
  virtual void for_each_carrier_elem(
      const FinSetObj& x, const std::function<void(const Elem&)>& f) const;
  /// Like for_each_carrier_elem, but table-shaped elements may be streamed
  /// through one reused scratch node: handles are only valid inside the
  /// callback, may be applied or compared with Elem::cmp, and must never be
  /// stored, hashed or pointer-compared. Keeps the big sweeps (e.g. the
  /// T^3 associativity domain) out of the intern pool.
  virtual void for_each_carrier_elem_scratch(
      const FinSetObj& x, const std::function<void(const Elem&)>& f) const {
    for_each_carrier_elem(x, f);
  }

  virtual Elem unit(const FinSetObj& x, const Elem& v) const = 0;
  virtual Elem bind(const FinSetObj& x, const FinSetObj& y, const Elem& t,
                    const ElemFn& k) const = 0;
  virtual Elem fmap(const FinSetObj& x, const FinSetObj& y, const Elem& t,
                    const ElemFn& f) const;
  virtual Elem mult(const FinSetObj& x, const Elem& tt) const;
  virtual Elem strength(const FinSetObj& x, const FinSetObj& y, const Elem& v,
                        const Elem& t) const = 0;

  /// True when mult is given directly rather than derived from bind; the
  /// law suite uses it to pick checkable routes.
  virtual bool primitive_mult() const { return false; }
  virtual bool primitive_bind() const { return false; }

  /// True when the elementwise operations consult their object arguments
  /// (continuation-style models must enumerate them). Models with purely
  /// structural elements ignore the objects, letting interpreters sequence
  /// at huge types without materialising their denotations.
  virtual bool elementwise_needs_objects() const { return false; }

  void add_generic(GenericEffect g);
  const std::vector<GenericEffect>& generics() const { return generics_; }
  const GenericEffect& generic(const Ident& op) const;
  bool has_generic(const Ident& op) const;
  /// generic(op) evaluated at a point of |G| (memoised).
  Elem generic_at(const Ident& op, const Elem& a) const;

  /// Installs the standard get/set generic effects for models that admit
  /// them; locs interprets Loc and values the stored value type. Models
  /// without a store reject this with ConfigError.
  virtual void install_state_ops(const FinSetObj& locs,
                                 const FinSetObj& values);

  // ---- table views (small carriers only) ----
  FinFn unit_fn(const FinSetObj& x) const;
  FinFn mult_fn(const FinSetObj& x) const;
  FinFn fmap_fn(const FinFn& f) const;
  FinFn strength_fn(const FinSetObj& x, const FinSetObj& y) const;
  FinFn generic_fn(const Ident& op) const;
  /// Kleisli extension of a table k : X -> T Y as a table T X -> T Y.
  FinFn bind_fn(const FinFn& k, const FinSetObj& x, const FinSetObj& y) const;

 private:
  std::string name_;
  std::vector<GenericEffect> generics_;
  mutable std::mutex mu_;
  mutable std::unordered_map<FinSetObj, FinSetObj, FinSetObjHash> carriers_;
  mutable std::map<std::pair<Ident, Elem>, Elem> generic_memo_;
  virtual FinSetObj build_carrier(const FinSetObj& x) const = 0;
};

std::shared_ptr<MonadModel> identity_monad();
std::shared_ptr<MonadModel> state_monad(const FinSetObj& s);
std::shared_ptr<MonadModel> reader_monad(const FinSetObj& s);
std::shared_ptr<MonadModel> writer_monad(const Monoid& m);
/// Continuations over global state with answer object R: computations map
/// state-indexed continuations of X to state-indexed answers,
/// T X = (R^S)^(R^(X*S)). Carriers beyond tiny X are astronomically large;
/// everything here stays elementwise.
std::shared_ptr<MonadModel> cont_state_monad(const FinSetObj& r,
                                             const FinSetObj& s);

// ---- algebraic operations <-> generic effects ----------------------------

/// The algebraic operation alpha_X : (T X)^|G'| -> (T X)^|G| induced by the
/// generic effect of `op` via bind.
FinFn generic_to_algebraic(const MonadModel& t, const Ident& op,
                           const FinSetObj& x);
/// Recovers the generic effect from an algebraic operation by instantiating
/// at X = |G'| on the unit continuation.
FinFn algebraic_to_generic(const MonadModel& t, const Ident& op);

// ---- law checking ---------------------------------------------------------

enum class LawStatus { Pass, Fail, Skipped };

struct LawResult {
  std::string law;
  std::string scope;     // model + objects the law was checked at
  LawStatus status;
  unsigned long long checked = 0;
  std::string detail;    // counterexample or skip reason
};

struct LawReport {
  std::vector<LawResult> results;
  bool all_pass() const;
  unsigned long long total_checked() const;
  std::string summary() const;
};

struct LawOptions {
  /// Upper bound on lazily enumerated candidates per law instance (guards
  /// the T^3 associativity sweep).
  unsigned long long max_iterations = 1ull << 28;
};

/// Exhaustively verifies functor, unit, associativity, strength coherence
/// and the agreement of the Kleisli-triple and strong-monad presentations,
/// on the given objects, skipping (and recording) instances whose carriers
/// cannot be represented within the configured limits.
LawReport check_monad_laws(const MonadModel& t,
                           const std::vector<FinSetObj>& objects,
                           const LawOptions& opts = {});

}  // namespace effet
