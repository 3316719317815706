#include "effet/elem.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "effet/errors.hpp"

namespace effet {

struct Elem::Node {
  Kind kind;
  std::size_t h;
  std::string name;                              // Atom
  Elem a, b;                                     // Pair / Inj (a only)
  std::vector<std::pair<Elem, Elem>> ents;       // Table

  bool same(const Node& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::Atom: return name == o.name;
      case Kind::Star: return true;
      case Kind::Pair: return a == o.a && b == o.b;
      case Kind::InjL:
      case Kind::InjR: return a == o.a;
      case Kind::Table: return ents == o.ents;
    }
    return false;
  }
};

namespace {

constexpr std::size_t kFnvOffset = 1469598103934665603ull;
constexpr std::size_t kFnvPrime = 1099511628211ull;

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::size_t node_hash(const Elem::Node& n) {
  std::size_t h = kFnvOffset;
  h = mix(h, static_cast<std::size_t>(n.kind) * kFnvPrime);
  switch (n.kind) {
    case Elem::Kind::Atom:
      for (char c : n.name) h = (h ^ static_cast<unsigned char>(c)) * kFnvPrime;
      break;
    case Elem::Kind::Star:
      break;
    case Elem::Kind::Pair:
      h = mix(h, n.a.hash());
      h = mix(h, n.b.hash());
      break;
    case Elem::Kind::InjL:
    case Elem::Kind::InjR:
      h = mix(h, n.a.hash());
      break;
    case Elem::Kind::Table:
      for (const auto& [k, v] : n.ents) {
        h = mix(h, k.hash());
        h = mix(h, v.hash());
      }
      break;
  }
  return h;
}

// transparent probe for table interning without a heap-allocated probe node
struct TableProbe {
  const std::vector<std::pair<Elem, Elem>>* ents;
  std::size_t h;
};

struct NodePtrHash {
  using is_transparent = void;
  std::size_t operator()(const Elem::Node* n) const { return n->h; }
  std::size_t operator()(const TableProbe& p) const { return p.h; }
};
struct NodePtrEq {
  using is_transparent = void;
  bool operator()(const Elem::Node* x, const Elem::Node* y) const {
    return x->h == y->h && x->same(*y);
  }
  bool operator()(const TableProbe& p, const Elem::Node* n) const {
    return p.h == n->h && n->kind == Elem::Kind::Table && n->ents == *p.ents;
  }
  bool operator()(const Elem::Node* n, const TableProbe& p) const {
    return (*this)(p, n);
  }
};

std::mutex& pool_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_set<const Elem::Node*, NodePtrHash, NodePtrEq>& pool() {
  // Interned nodes live for the process lifetime.
  static auto* p =
      new std::unordered_set<const Elem::Node*, NodePtrHash, NodePtrEq>();
  return *p;
}

}  // namespace

static const Elem::Node* intern(Elem::Node&& probe) {
  probe.h = node_hash(probe);
  std::lock_guard<std::mutex> lock(pool_mutex());
  auto it = pool().find(&probe);
  if (it != pool().end()) return *it;
  auto* owned = new Elem::Node(std::move(probe));
  pool().insert(owned);
  return owned;
}

Elem Elem::atom(std::string_view name) {
  Node n;
  n.kind = Kind::Atom;
  n.name = std::string(name);
  return Elem(intern(std::move(n)));
}

Elem Elem::star() {
  static const Node* s = [] {
    Node n;
    n.kind = Kind::Star;
    return intern(std::move(n));
  }();
  return Elem(s);
}

Elem Elem::pair(Elem first, Elem second) {
  Node n;
  n.kind = Kind::Pair;
  n.a = first;
  n.b = second;
  return Elem(intern(std::move(n)));
}

Elem Elem::inl(Elem v) {
  Node n;
  n.kind = Kind::InjL;
  n.a = v;
  return Elem(intern(std::move(n)));
}

Elem Elem::inr(Elem v) {
  Node n;
  n.kind = Kind::InjR;
  n.a = v;
  return Elem(intern(std::move(n)));
}

static std::size_t table_hash(const std::vector<std::pair<Elem, Elem>>& es) {
  std::size_t h = kFnvOffset;
  h = mix(h, static_cast<std::size_t>(Elem::Kind::Table) * kFnvPrime);
  for (const auto& [k, v] : es) {
    h = mix(h, k.hash());
    h = mix(h, v.hash());
  }
  return h;
}

Elem Elem::table(std::vector<std::pair<Elem, Elem>> entries) {
#ifndef NDEBUG
  for (std::size_t i = 1; i < entries.size(); ++i)
    assert(cmp(entries[i - 1].first, entries[i].first) < 0);
#endif
  TableProbe probe{&entries, table_hash(entries)};
  std::lock_guard<std::mutex> lock(pool_mutex());
  auto it = pool().find(probe);
  if (it != pool().end()) return Elem(*it);
  auto* owned = new Node();
  owned->kind = Kind::Table;
  owned->ents = std::move(entries);
  owned->h = probe.h;
  pool().insert(owned);
  return Elem(owned);
}

Elem::Kind Elem::kind() const { return n_->kind; }

const std::string& Elem::atom_name() const { return n_->name; }

Elem Elem::first() const { return n_->a; }
Elem Elem::second() const { return n_->b; }
Elem Elem::inj_value() const { return n_->a; }

const std::vector<std::pair<Elem, Elem>>& Elem::entries() const {
  return n_->ents;
}

Elem Elem::apply(Elem key) const {
  const auto& es = n_->ents;
  if (es.size() <= 8) {
    for (const auto& [k, v] : es)
      if (k == key) return v;
  } else {
    auto it = std::lower_bound(
        es.begin(), es.end(), key,
        [](const std::pair<Elem, Elem>& e, const Elem& k) {
          return cmp(e.first, k) < 0;
        });
    if (it != es.end() && it->first == key) return it->second;
  }
  throw InternalError("table lookup miss: key " + key.str() +
                      " not in table " + str());
}

Elem Elem::with_entry(Elem key, Elem val) const {
  std::vector<std::pair<Elem, Elem>> es = n_->ents;
  for (auto& [k, v] : es) {
    if (k == key) {
      v = val;
      return table(std::move(es));
    }
  }
  throw InternalError("table update miss: key " + key.str());
}

std::size_t Elem::hash() const { return n_->h; }

int Elem::cmp(Elem x, Elem y) {
  if (x.n_ == y.n_) return 0;
  auto kx = static_cast<int>(x.kind()), ky = static_cast<int>(y.kind());
  if (kx != ky) return kx < ky ? -1 : 1;
  switch (x.kind()) {
    case Kind::Atom: {
      int c = x.atom_name().compare(y.atom_name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Star:
      return 0;
    case Kind::Pair: {
      int c = cmp(x.first(), y.first());
      return c != 0 ? c : cmp(x.second(), y.second());
    }
    case Kind::InjL:
    case Kind::InjR:
      return cmp(x.inj_value(), y.inj_value());
    case Kind::Table: {
      const auto& ex = x.entries();
      const auto& ey = y.entries();
      std::size_t n = std::min(ex.size(), ey.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = cmp(ex[i].first, ey[i].first);
        if (c != 0) return c;
        c = cmp(ex[i].second, ey[i].second);
        if (c != 0) return c;
      }
      if (ex.size() != ey.size()) return ex.size() < ey.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

ScratchTable::ScratchTable() : n_(new Elem::Node()) {
  n_->kind = Elem::Kind::Table;
  n_->h = 0;
}

ScratchTable::~ScratchTable() { delete n_; }

void ScratchTable::assign(std::vector<std::pair<Elem, Elem>> entries) {
  n_->ents = std::move(entries);
}

void ScratchTable::set_value(std::size_t i, Elem v) {
  n_->ents[i].second = v;
}

Elem ScratchTable::handle() const { return Elem(n_); }

std::string Elem::str() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::Atom:
      os << atom_name();
      break;
    case Kind::Star:
      os << "()";
      break;
    case Kind::Pair:
      os << "(" << first().str() << ", " << second().str() << ")";
      break;
    case Kind::InjL:
      os << "inl " << inj_value().str();
      break;
    case Kind::InjR:
      os << "inr " << inj_value().str();
      break;
    case Kind::Table: {
      os << "{";
      bool sep = false;
      for (const auto& [k, v] : entries()) {
        if (sep) os << ", ";
        sep = true;
        os << k.str() << " -> " << v.str();
      }
      os << "}";
      break;
    }
  }
  return os.str();
}

}  // namespace effet
