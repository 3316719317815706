#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "effet/elem.hpp"
#include "effet/errors.hpp"

namespace effet {

/// Global slot budget for constructed objects and tables. Exponentials
/// explode; hitting the budget raises SizeLimitExceeded instead of OOM.
std::size_t size_limit();
void set_size_limit(std::size_t n);

/// RAII override of the size limit, used by tests.
class SizeLimitGuard {
 public:
  explicit SizeLimitGuard(std::size_t n) : prev_(size_limit()) {
    set_size_limit(n);
  }
  ~SizeLimitGuard() { set_size_limit(prev_); }

 private:
  std::size_t prev_;
};

/// A canonical finite set: a sorted duplicate-free list of elements.
/// Equality of objects is equality of element lists, so constructions
/// that are only "unique up to iso" in general become strict here.
class FinSetObj {
 public:
  struct Data;

  FinSetObj();
  static FinSetObj from_elems(std::vector<Elem> elems);   // sorts + dedups
  static FinSetObj from_sorted(std::vector<Elem> elems);  // trusts caller

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const std::vector<Elem>& elems() const;
  bool contains(const Elem& e) const;
  std::size_t index_of(const Elem& e) const;  // throws InternalError if absent

  bool operator==(const FinSetObj& o) const;
  bool operator!=(const FinSetObj& o) const { return !(*this == o); }
  std::size_t hash() const;
  std::string str() const;

 private:
  std::shared_ptr<const Data> d_;
};

struct FinSetObjHash {
  std::size_t operator()(const FinSetObj& x) const { return x.hash(); }
};

/// A total function table between canonical finite sets.
class FinFn {
 public:
  FinFn(FinSetObj dom, FinSetObj cod, const ElemFn& f);
  static FinFn from_values(FinSetObj dom, FinSetObj cod,
                           std::vector<Elem> vals);
  static FinFn identity(const FinSetObj& x);
  static FinFn constant(const FinSetObj& dom, const FinSetObj& cod, Elem v);
  /// The inclusion of a subset object into a superset object.
  static FinFn inclusion(const FinSetObj& sub, const FinSetObj& super);

  const FinSetObj& dom() const;
  const FinSetObj& cod() const;
  const std::vector<Elem>& values() const;
  Elem operator()(const Elem& x) const;

  FinFn then(const FinFn& g) const;  // g after *this
  bool surjective() const;
  bool injective() const;
  FinSetObj image() const;  // canonical sorted image object
  Elem as_table_elem() const;

  bool operator==(const FinFn& o) const;
  bool operator!=(const FinFn& o) const { return !(*this == o); }
  std::string str() const;

 private:
  FinSetObj dom_, cod_;
  std::shared_ptr<const std::vector<Elem>> vals_;
};

// ---- bicartesian closed structure --------------------------------------

FinSetObj terminal_obj();
FinSetObj initial_obj();

FinSetObj product(const FinSetObj& x, const FinSetObj& y);
FinFn proj1(const FinSetObj& x, const FinSetObj& y);
FinFn proj2(const FinSetObj& x, const FinSetObj& y);
/// Pairing <f, g> : Z -> X * Y of f : Z -> X and g : Z -> Y.
FinFn pair_fn(const FinFn& f, const FinFn& g);
/// f * g : X*X' -> Y*Y' acting componentwise.
FinFn product_fn(const FinFn& f, const FinFn& g);

FinSetObj coproduct(const FinSetObj& x, const FinSetObj& y);
FinFn inl_fn(const FinSetObj& x, const FinSetObj& y);
FinFn inr_fn(const FinSetObj& x, const FinSetObj& y);
/// Copairing [f, g] : X+Y -> Z.
FinFn copair_fn(const FinFn& f, const FinFn& g);

/// All function tables X -> Y in canonical order; |result| = |Y|^|X|.
FinSetObj exponential(const FinSetObj& x, const FinSetObj& y);
FinFn eval_fn(const FinSetObj& x, const FinSetObj& y);  // Y^X * X -> Y
/// curry(f) : Z -> Y^X for f : Z*X -> Y.
FinFn curry_fn(const FinFn& f, const FinSetObj& z, const FinSetObj& x,
               const FinSetObj& y);
/// Post-composition g^X : Y^X -> Z^X for g : Y -> Z (the functor (-)^X).
FinFn exp_post(const FinSetObj& x, const FinFn& g);

// ---- (surjection, injection) factorisation ------------------------------

struct Factorisation {
  FinFn e;        // surjection onto the image
  FinFn m;        // injection of the image into the codomain
  FinSetObj img;  // canonical image object
  FinFn of;       // the factorised map; m . e == of
};

/// Canonical image factorisation. Strictly functorial: the image object is
/// the sorted list of reached codomain elements.
Factorisation factorise(const FinFn& f);

/// Unique diagonal h with h . e = f and m . h = g for a commuting square
/// m . f = g . e with e surjective and m injective. Throws
/// SquareDoesNotCommute when the square does not commute.
FinFn fill_in(const FinFn& e, const FinFn& m, const FinFn& f, const FinFn& g);

struct MonoPullback {
  FinFn sub;          // A' >-> X, the pulled-back injection
  FinFn restriction;  // A' -> A over the top of the square
};

/// Pullback of an injection m : A >-> Y along f : X -> Y.
MonoPullback pullback_mono(const FinFn& m, const FinFn& f);

}  // namespace effet
