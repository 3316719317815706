#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace effet {

/// An interned, immutable structural value: atoms, the unit star, pairs,
/// sum injections, and finite function tables. Handles are cheap to copy;
/// equality is pointer equality on the interned node, ordering is the
/// structural total order (kind rank first, then contents).
///
/// Tables keep their entries key-sorted; the canonical-domain invariant
/// (keys = exactly the declared domain) is enforced by FinFn, not here.
class Elem {
 public:
  enum class Kind : std::uint8_t { Atom, Star, Pair, InjL, InjR, Table };
  struct Node;  // interned node; opaque to clients

  Elem() : n_(nullptr) {}

  static Elem atom(std::string_view name);
  static Elem star();
  static Elem pair(Elem first, Elem second);
  static Elem inl(Elem v);
  static Elem inr(Elem v);
  /// Entries must be key-sorted and key-unique.
  static Elem table(std::vector<std::pair<Elem, Elem>> entries);

  bool valid() const { return n_ != nullptr; }
  Kind kind() const;
  const std::string& atom_name() const;
  Elem first() const;   // Pair
  Elem second() const;  // Pair
  Elem inj_value() const;
  const std::vector<std::pair<Elem, Elem>>& entries() const;

  /// Table lookup; throws InternalError when the key is absent.
  Elem apply(Elem key) const;
  /// Functional single-entry update; key must already be present.
  Elem with_entry(Elem key, Elem val) const;

  std::size_t hash() const;
  bool operator==(const Elem& o) const { return n_ == o.n_; }
  bool operator!=(const Elem& o) const { return n_ != o.n_; }
  static int cmp(Elem a, Elem b);
  bool operator<(const Elem& o) const { return cmp(*this, o) < 0; }

  std::string str() const;

 private:
  explicit Elem(const Node* n) : n_(n) {}
  const Node* n_;
  friend class ScratchTable;
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const { return e.hash(); }
};

using ElemFn = std::function<Elem(const Elem&)>;

/// A reusable, non-interned table element for streaming enumerations of
/// huge carriers without growing the intern pool. The handle may only be
/// applied or compared structurally (Elem::cmp); it must never be stored,
/// hashed, or compared with operator==, and it dangles once the owner dies
/// or is reassigned.
class ScratchTable {
 public:
  ScratchTable();
  ~ScratchTable();
  ScratchTable(const ScratchTable&) = delete;
  ScratchTable& operator=(const ScratchTable&) = delete;

  void assign(std::vector<std::pair<Elem, Elem>> entries);
  void set_value(std::size_t i, Elem v);
  Elem handle() const;

 private:
  Elem::Node* n_;
};

}  // namespace effet
