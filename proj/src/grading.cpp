#include "effet/grading.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

namespace effet {

namespace {
std::atomic<std::size_t> g_sat_limit{100'000};
}

std::size_t saturation_limit() { return g_sat_limit.load(); }
void set_saturation_limit(std::size_t n) { g_sat_limit.store(n); }

// ---- FreeTerm ----------------------------------------------------------------

struct FreeTerm::Node {
  bool leaf;
  Elem value;  // leaf
  Ident op;
  Elem arg;
  std::vector<FreeTerm> kont;
  int depth;
};

FreeTerm FreeTerm::leaf(Elem x) {
  auto n = std::make_shared<Node>();
  n->leaf = true;
  n->value = x;
  n->depth = 0;
  FreeTerm t;
  t.n_ = std::move(n);
  return t;
}

FreeTerm FreeTerm::node(Ident op, Elem arg, std::vector<FreeTerm> kont) {
  auto n = std::make_shared<Node>();
  n->leaf = false;
  n->op = std::move(op);
  n->arg = arg;
  int d = 0;
  for (const FreeTerm& k : kont) d = std::max(d, k.depth());
  n->depth = d + 1;
  n->kont = std::move(kont);
  FreeTerm t;
  t.n_ = std::move(n);
  return t;
}

bool FreeTerm::is_leaf() const { return n_->leaf; }
const Elem& FreeTerm::leaf_value() const { return n_->value; }
const Ident& FreeTerm::op() const { return n_->op; }
const Elem& FreeTerm::arg() const { return n_->arg; }
const std::vector<FreeTerm>& FreeTerm::kont() const { return n_->kont; }
int FreeTerm::depth() const { return n_->depth; }

int FreeTerm::cmp(const FreeTerm& a, const FreeTerm& b) {
  if (a.n_ == b.n_) return 0;
  if (a.is_leaf() != b.is_leaf()) return a.is_leaf() ? -1 : 1;
  if (a.is_leaf()) return Elem::cmp(a.leaf_value(), b.leaf_value());
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  int c = Elem::cmp(a.arg(), b.arg());
  if (c != 0) return c;
  std::size_t n = std::min(a.kont().size(), b.kont().size());
  for (std::size_t i = 0; i < n; ++i) {
    c = cmp(a.kont()[i], b.kont()[i]);
    if (c != 0) return c;
  }
  if (a.kont().size() != b.kont().size())
    return a.kont().size() < b.kont().size() ? -1 : 1;
  return 0;
}

bool FreeTerm::operator==(const FreeTerm& o) const { return cmp(*this, o) == 0; }

std::string FreeTerm::str() const {
  if (is_leaf()) return "ret " + leaf_value().str();
  std::ostringstream os;
  os << op() << "(" << arg().str() << "; ";
  for (std::size_t i = 0; i < kont().size(); ++i) {
    if (i) os << ", ";
    os << kont()[i].str();
  }
  os << ")";
  return os.str();
}

std::vector<FreeTerm> enumerate_free_terms(const MonadModel& t,
                                           const Effect& eps,
                                           const FinSetObj& x, int depth) {
  if (eps.is_top()) throw InternalError("free terms need a concrete effect");
  std::vector<FreeTerm> cur;
  cur.reserve(x.size());
  for (const Elem& v : x.elems()) cur.push_back(FreeTerm::leaf(v));
  for (int d = 1; d <= depth; ++d) {
    std::vector<FreeTerm> next = cur;  // depth <= d-1 terms survive
    for (const Ident& op : eps.ops()) {
      const GenericEffect& g = t.generic(op);
      std::size_t arity = g.res.size();
      // every continuation tuple over the previous layer
      if (arity == 0) {
        for (const Elem& a : g.arg.elems())
          next.push_back(FreeTerm::node(op, a, {}));
        continue;
      }
      unsigned long long tuples = 1;
      for (std::size_t i = 0; i < arity; ++i) {
        tuples *= cur.size();
        if (tuples > size_limit())
          throw SizeLimitExceeded("free-term enumeration at depth " +
                                  std::to_string(d) + " explodes");
      }
      std::vector<std::size_t> idx(arity, 0);
      for (;;) {
        std::vector<FreeTerm> kont;
        kont.reserve(arity);
        for (std::size_t i = 0; i < arity; ++i) kont.push_back(cur[idx[i]]);
        for (const Elem& a : g.arg.elems())
          next.push_back(FreeTerm::node(op, a, kont));
        std::size_t i = arity;
        for (;;) {
          if (i == 0) goto tuple_done;
          --i;
          if (++idx[i] < cur.size()) break;
          idx[i] = 0;
        }
      }
    tuple_done:;
    }
    std::sort(next.begin(), next.end(),
              [](const FreeTerm& a, const FreeTerm& b) {
                return FreeTerm::cmp(a, b) < 0;
              });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.size() > size_limit())
      throw SizeLimitExceeded("free-term enumeration too large");
    cur = std::move(next);
  }
  return cur;
}

Elem interpret_free_term(const MonadModel& t, const FinSetObj& x,
                         const FreeTerm& term) {
  if (term.is_leaf()) return t.unit(x, term.leaf_value());
  const GenericEffect& g = t.generic(term.op());
  const auto& kont = term.kont();
  return t.bind(g.res, x, t.generic_at(term.op(), term.arg()),
                [&](const Elem& b) {
                  return interpret_free_term(t, x, kont.at(g.res.index_of(b)));
                });
}

// ---- saturation ---------------------------------------------------------------

GradedCarrier image_fixpoint(const MonadModel& t, const Effect& eps,
                             const FinSetObj& x) {
  if (eps.is_top())
    throw InternalError("graded carriers need a concrete effect");
  for (const Ident& op : eps.ops()) t.generic(op);  // validate early


  std::vector<Elem> frontier;
  std::unordered_set<Elem, ElemHash> seen;
  for (const Elem& v : x.elems()) {
    Elem u = t.unit(x, v);
    if (seen.insert(u).second) frontier.push_back(u);
  }
  std::vector<Elem> pool = frontier;
  int rounds = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    ++rounds;
    // Jacobi-style rounds: continuations range over the pool at the start
    // of the round; ops in sorted order, tuples in canonical order.
    std::vector<Elem> snapshot = pool;
    std::sort(snapshot.begin(), snapshot.end(),
              [](const Elem& a, const Elem& b) { return Elem::cmp(a, b) < 0; });
    for (const Ident& op : eps.ops()) {
      const GenericEffect& g = t.generic(op);
      std::size_t arity = g.res.size();
      if (arity == 0) {
        for (const Elem& a : g.arg.elems()) {
          Elem r = t.bind(g.res, x, t.generic_at(op, a),
                          [](const Elem&) -> Elem {
                            throw InternalError("empty continuation invoked");
                          });
          if (seen.insert(r).second) {
            pool.push_back(r);
            grew = true;
          }
        }
        continue;
      }
      std::vector<std::size_t> idx(arity, 0);
      for (;;) {
        for (const Elem& a : g.arg.elems()) {
          Elem r = t.bind(g.res, x, t.generic_at(op, a), [&](const Elem& b) {
            return snapshot[idx[g.res.index_of(b)]];
          });
          if (seen.insert(r).second) {
            pool.push_back(r);
            if (pool.size() > saturation_limit())
              throw SaturationLimitExceeded(
                  "graded carrier exceeded the saturation bound at " +
                  eps.str());
            grew = true;
          }
        }
        std::size_t i = arity;
        for (;;) {
          if (i == 0) goto round_op_done;
          --i;
          if (++idx[i] < snapshot.size()) break;
          idx[i] = 0;
        }
      }
    round_op_done:;
    }
  }

  FinSetObj subset = FinSetObj::from_elems(pool);
  FinFn unit_fn(x, subset, [&](const Elem& v) { return t.unit(x, v); });
  return GradedCarrier(eps, x, subset, unit_fn, rounds);
}

FinFn GradedCarrier::mono_fn(const MonadModel& t) const {
  return FinFn::inclusion(subset_, t.carrier(base_));
}

// ---- GradedFamily ---------------------------------------------------------------

bool GradedFamily::key_less(const std::pair<Effect, FinSetObj>& a,
                            const std::pair<Effect, FinSetObj>& b) {
  if (a.first != b.first) return a.first < b.first;
  const auto& ea = a.second.elems();
  const auto& eb = b.second.elems();
  if (ea.size() != eb.size()) return ea.size() < eb.size();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    int c = Elem::cmp(ea[i], eb[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

const GradedCarrier& GradedFamily::carrier(const Effect& eps,
                                           const FinSetObj& x) const {
  auto key = std::make_pair(eps, x);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  auto built =
      std::make_shared<const GradedCarrier>(image_fixpoint(*t_, eps, x));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, _] = cache_.emplace(std::move(key), std::move(built));
  return *it->second;
}

FinFn GradedFamily::inclusion(const Effect& eps, const Effect& eps2,
                              const FinSetObj& x) const {
  if (!eps.subset_of(eps2))
    throw InternalError("inclusion requires eps <= eps2");
  const GradedCarrier& small = carrier(eps, x);
  const GradedCarrier& big = carrier(eps2, x);
  for (const Elem& e : small.subset().elems())
    if (!big.contains(e))
      throw InternalError(
          "monotonicity failure: graded carrier is not contained in the "
          "larger annotation's carrier (engine bug)");
  return FinFn::inclusion(small.subset(), big.subset());
}

Elem GradedFamily::graded_bind(const Effect& eps, const FinSetObj& x,
                               const FinSetObj& y, const Elem& t,
                               const ElemFn& k) const {
  const GradedCarrier& cx = carrier(eps, x);
  const GradedCarrier& cy = carrier(eps, y);
  if (!cx.contains(t))
    throw InternalError("graded_bind: input outside the graded carrier");
  Elem r = t_->bind(x, y, t, [&](const Elem& v) {
    Elem u = k(v);
    if (!cy.contains(u))
      throw InternalError("graded_bind: continuation leaves the carrier");
    return u;
  });
  if (!cy.contains(r))
    throw InternalError(
        "graded_bind: closure failure, bind left the carrier (engine bug)");
  return r;
}

bool GradedFamily::check_commutative(const Effect& eps, const FinSetObj& x,
                                     const FinSetObj& y,
                                     std::string* witness) const {
  const GradedCarrier& cx = carrier(eps, x);
  const GradedCarrier& cy = carrier(eps, y);
  FinSetObj xy = product(x, y);
  const GradedCarrier& cxy = carrier(eps, xy);
  for (const Elem& tv : cx.subset().elems()) {
    for (const Elem& uv : cy.subset().elems()) {
      // left-first: run tv, then pair its value with uv via strength
      Elem lhs = t_->bind(x, xy, tv, [&](const Elem& v) {
        return t_->strength(x, y, v, uv);
      });
      // right-first: run uv, pair with tv, then swap
      Elem rhs0 = t_->bind(y, product(y, x), uv, [&](const Elem& w) {
        return t_->strength(y, x, w, tv);
      });
      Elem rhs = t_->fmap(product(y, x), xy, rhs0, [](const Elem& p) {
        return Elem::pair(p.second(), p.first());
      });
      if (!cxy.contains(lhs) || !cxy.contains(rhs))
        throw InternalError("sequencing left the graded carrier (engine bug)");
      if (lhs != rhs) {
        if (witness)
          *witness = "t = " + tv.str() + ", u = " + uv.str() +
                     "; left-first = " + lhs.str() +
                     ", right-first = " + rhs.str();
        return false;
      }
    }
  }
  return true;
}

// ---- graded law suite ------------------------------------------------------

LawReport check_graded_laws(const GradedFamily& fam, const Effect& eps,
                            const FinSetObj& x, const FinSetObj& y) {
  const MonadModel& t = fam.model();
  LawReport rep;
  auto add = [&](const std::string& law, LawStatus st, unsigned long long n,
                 const std::string& detail = "") {
    rep.results.push_back(LawResult{
        law,
        t.name() + " graded at " + eps.str() + ", |X|=" +
            std::to_string(x.size()) + ", |Y|=" + std::to_string(y.size()),
        st, n, detail});
  };

  const GradedCarrier& cx = fam.carrier(eps, x);
  const GradedCarrier& cy = fam.carrier(eps, y);

  // unit lands in the carrier (subset invariant)
  {
    unsigned long long n = 0;
    bool ok = true;
    for (const Elem& v : x.elems()) {
      ++n;
      if (!cx.contains(t.unit(x, v))) ok = false;
    }
    add("graded unit containment", ok ? LawStatus::Pass : LawStatus::Fail, n);
  }

  // left and right unit for the restricted bind
  {
    unsigned long long n = 0;
    std::string bad;
    for (const Elem& tv : cx.subset().elems()) {
      ++n;
      if (fam.graded_bind(eps, x, x, tv,
                          [&](const Elem& v) { return t.unit(x, v); }) != tv) {
        bad = "right unit fails at " + tv.str();
        break;
      }
    }
    add("graded right unit", bad.empty() ? LawStatus::Pass : LawStatus::Fail,
        n, bad);
  }
  {
    // continuations = tables from X into the graded carrier at Y
    auto tuples = [&]() -> unsigned long long {
      unsigned long long r = 1;
      for (std::size_t i = 0; i < x.size(); ++i) {
        r *= cy.subset().size();
        if (r > (1ull << 18)) return 0;
      }
      return r;
    }();
    if (tuples == 0) {
      add("graded left unit", LawStatus::Skipped, 0,
          "continuation space too large");
    } else {
      unsigned long long n = 0;
      std::string bad;
      std::vector<std::size_t> idx(x.size(), 0);
      const auto& cyv = cy.subset().elems();
      bool done = x.empty();
      while (!done) {
        ElemFn k = [&](const Elem& v) { return cyv[idx[x.index_of(v)]]; };
        for (const Elem& v : x.elems()) {
          ++n;
          if (fam.graded_bind(eps, x, y, t.unit(x, v), k) != k(v)) {
            bad = "left unit fails";
            break;
          }
        }
        if (!bad.empty()) break;
        std::size_t i = x.size();
        for (;;) {
          if (i == 0) {
            done = true;
            break;
          }
          --i;
          if (++idx[i] < cyv.size()) break;
          idx[i] = 0;
        }
      }
      add("graded left unit", bad.empty() ? LawStatus::Pass : LawStatus::Fail,
          n, bad);
    }
  }

  // associativity in bind form, with both continuation spaces bounded
  {
    unsigned long long fx = 1, gy = 1;
    bool feasible = true;
    for (std::size_t i = 0; i < x.size() && feasible; ++i) {
      fx *= cy.subset().size();
      if (fx > (1ull << 10)) feasible = false;
    }
    const GradedCarrier& cz = cy;  // take Z = Y
    for (std::size_t i = 0; i < y.size() && feasible; ++i) {
      gy *= cz.subset().size();
      if (gy > (1ull << 10)) feasible = false;
    }
    if (!feasible || fx * gy * cx.subset().size() > (1ull << 22)) {
      add("graded associativity", LawStatus::Skipped, 0,
          "quantification too large");
    } else {
      unsigned long long n = 0;
      std::string bad;
      const auto& cyv = cy.subset().elems();
      const auto& czv = cz.subset().elems();
      std::vector<std::size_t> fi(x.size(), 0);
      bool fdone = false;
      while (!fdone && bad.empty()) {
        ElemFn f = [&](const Elem& v) { return cyv[fi[x.index_of(v)]]; };
        std::vector<std::size_t> gi(y.size(), 0);
        bool gdone = false;
        while (!gdone && bad.empty()) {
          ElemFn g = [&](const Elem& v) { return czv[gi[y.index_of(v)]]; };
          for (const Elem& tv : cx.subset().elems()) {
            ++n;
            Elem lhs = fam.graded_bind(eps, y, y,
                                       fam.graded_bind(eps, x, y, tv, f), g);
            Elem rhs = fam.graded_bind(eps, x, y, tv, [&](const Elem& v) {
              return fam.graded_bind(eps, y, y, f(v), g);
            });
            if (lhs != rhs) {
              bad = "associativity fails at " + tv.str();
              break;
            }
          }
          std::size_t i = y.size();
          for (;;) {
            if (i == 0) {
              gdone = true;
              break;
            }
            --i;
            if (++gi[i] < czv.size()) break;
            gi[i] = 0;
          }
        }
        std::size_t i = x.size();
        for (;;) {
          if (i == 0) {
            fdone = true;
            break;
          }
          --i;
          if (++fi[i] < cyv.size()) break;
          fi[i] = 0;
        }
      }
      add("graded associativity",
          bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
    }
  }

  // strength restricted to the carriers stays inside them
  {
    FinSetObj xy = product(x, y);
    const GradedCarrier& cxy = fam.carrier(eps, xy);
    unsigned long long n = 0;
    std::string bad;
    for (const Elem& v : x.elems()) {
      for (const Elem& uv : cy.subset().elems()) {
        ++n;
        if (!cxy.contains(t.strength(x, y, v, uv))) {
          bad = "strength leaves the carrier at (" + v.str() + ", " +
                uv.str() + ")";
          break;
        }
      }
      if (!bad.empty()) break;
    }
    add("graded strength closure",
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  // mono is a strong monad morphism: representationally the identity, so
  // commutation squares are table recomputations on both sides
  {
    unsigned long long n = 0;
    std::string bad;
    for (const Elem& v : x.elems()) {
      ++n;
      if (cx.unit_fn()(v) != t.unit(x, v)) {
        bad = "mono does not commute with unit";
        break;
      }
    }
    add("mono preserves unit", bad.empty() ? LawStatus::Pass : LawStatus::Fail,
        n, bad);
  }

  // generics factor through the graded carrier: mono . generic_eps = generic
  if (!eps.is_top()) {
    for (const Ident& op : eps.ops()) {
      const GenericEffect& g = t.generic(op);
      const GradedCarrier& cres = fam.carrier(eps, g.res);
      unsigned long long n = 0;
      std::string bad;
      for (const Elem& a : g.arg.elems()) {
        ++n;
        Elem e = t.generic_at(op, a);
        if (!cres.contains(e)) {
          bad = "generic effect escapes the carrier at " + a.str();
          break;
        }
      }
      add("generic factorisation (" + op + ")",
          bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
    }
  }

  return rep;
}

}  // namespace effet
