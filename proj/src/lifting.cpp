#include "effet/lifting.hpp"

#include <algorithm>
#include <set>

namespace effet {

namespace {
struct PairLess {
  bool operator()(const std::pair<Elem, Elem>& a,
                  const std::pair<Elem, Elem>& b) const {
    int c = Elem::cmp(a.first, b.first);
    if (c != 0) return c < 0;
    return Elem::cmp(a.second, b.second) < 0;
  }
};

void sort_pairs(std::vector<std::pair<Elem, Elem>>& ps) {
  std::sort(ps.begin(), ps.end(), PairLess{});
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
}
}  // namespace

Rel Rel::diagonal(const FinSetObj& x) {
  std::vector<std::pair<Elem, Elem>> ps;
  ps.reserve(x.size());
  for (const Elem& e : x.elems()) ps.emplace_back(e, e);
  return Rel{x, x, std::move(ps)};
}

Rel Rel::from_pairs(FinSetObj left, FinSetObj right,
                    std::vector<std::pair<Elem, Elem>> pairs) {
  for (const auto& [a, b] : pairs)
    if (!left.contains(a) || !right.contains(b))
      throw InternalError("relation pair outside its carrier sets");
  sort_pairs(pairs);
  return Rel{std::move(left), std::move(right), std::move(pairs)};
}

bool Rel::contains(const Elem& a, const Elem& b) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b),
                            PairLess{});
}

bool LiftedCarrier::contains(const Elem& a, const Elem& b) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b),
                            PairLess{});
}

LiftedCarrier free_lift(const GradedFamily& fam, const Effect& eps,
                        const Rel& r) {
  const MonadModel& t = fam.model();
  // the graded carrier of the left object, to pin the left components
  const GradedCarrier& cl = fam.carrier(eps, r.left);

  std::vector<std::pair<Elem, Elem>> pool;
  std::set<std::pair<Elem, Elem>, PairLess> seen;
  for (const auto& [a, b] : r.pairs) {
    auto p = std::make_pair(t.unit(r.left, a), t.unit(r.right, b));
    if (seen.insert(p).second) pool.push_back(p);
  }

  int rounds = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    ++rounds;
    std::vector<std::pair<Elem, Elem>> snapshot = pool;
    std::sort(snapshot.begin(), snapshot.end(), PairLess{});
    for (const Ident& op : eps.ops()) {
      const GenericEffect& g = t.generic(op);
      std::size_t arity = g.res.size();
      if (arity == 0) {
        for (const Elem& a : g.arg.elems()) {
          auto bad = [](const Elem&) -> Elem {
            throw InternalError("empty continuation invoked");
          };
          auto p = std::make_pair(
              t.bind(g.res, r.left, t.generic_at(op, a), bad),
              t.bind(g.res, r.right, t.generic_at(op, a), bad));
          if (seen.insert(p).second) {
            pool.push_back(p);
            grew = true;
          }
        }
        continue;
      }
      // continuation pairs: one related pair per point of |G'|
      std::vector<std::size_t> idx(arity, 0);
      for (;;) {
        for (const Elem& a : g.arg.elems()) {
          Elem lhs = t.bind(g.res, r.left, t.generic_at(op, a),
                            [&](const Elem& b) {
                              return snapshot[idx[g.res.index_of(b)]].first;
                            });
          Elem rhs = t.bind(g.res, r.right, t.generic_at(op, a),
                            [&](const Elem& b) {
                              return snapshot[idx[g.res.index_of(b)]].second;
                            });
          auto p = std::make_pair(lhs, rhs);
          if (seen.insert(p).second) {
            pool.push_back(p);
            if (pool.size() > saturation_limit())
              throw SaturationLimitExceeded("free lifting exceeded bound");
            grew = true;
          }
        }
        std::size_t i = arity;
        for (;;) {
          if (i == 0) goto op_done;
          --i;
          if (++idx[i] < snapshot.size()) break;
          idx[i] = 0;
        }
      }
    op_done:;
    }
  }

  // left components live in the graded carrier (the lifting is of the pair
  // (T_eps, T)); failure indicates an engine bug
  for (const auto& [a, _] : pool)
    if (!cl.contains(a))
      throw InternalError("free lifting escaped the graded carrier");

  sort_pairs(pool);
  return LiftedCarrier{eps, r, std::move(pool), rounds};
}

bool check_lift_closure(const GradedFamily& fam, const Effect& eps,
                        const Rel& r,
                        const std::vector<std::pair<Elem, Elem>>& pairs,
                        std::string* why) {
  const MonadModel& t = fam.model();
  auto contains = [&](const Elem& a, const Elem& b) {
    return std::binary_search(pairs.begin(), pairs.end(),
                              std::make_pair(a, b), PairLess{});
  };
  for (const auto& [a, b] : r.pairs) {
    if (!contains(t.unit(r.left, a), t.unit(r.right, b))) {
      if (why) *why = "unit pair missing at (" + a.str() + ", " + b.str() + ")";
      return false;
    }
  }
  for (const Ident& op : eps.ops()) {
    const GenericEffect& g = t.generic(op);
    std::size_t arity = g.res.size();
    if (arity == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
      for (const Elem& a : g.arg.elems()) {
        Elem lhs = t.bind(g.res, r.left, t.generic_at(op, a),
                          [&](const Elem& b) {
                            return pairs[idx[g.res.index_of(b)]].first;
                          });
        Elem rhs = t.bind(g.res, r.right, t.generic_at(op, a),
                          [&](const Elem& b) {
                            return pairs[idx[g.res.index_of(b)]].second;
                          });
        if (!contains(lhs, rhs)) {
          if (why)
            *why = "operation closure fails at " + op + "(" + a.str() + ")";
          return false;
        }
      }
      std::size_t i = arity;
      for (;;) {
        if (i == 0) goto next_op;
        --i;
        if (++idx[i] < pairs.size()) break;
        idx[i] = 0;
      }
    }
  next_op:;
  }
  return true;
}

MonoLemmaReport verify_mono_lemma(const GradedFamily& fam, const Effect& eps,
                                  const FinSetObj& x) {
  LiftedCarrier lift = free_lift(fam, eps, Rel::diagonal(x));
  MonoLemmaReport rep;
  rep.pairs_checked = lift.pairs.size();
  for (const auto& [f1, f2] : lift.pairs) {
    // mono is the set inclusion, so the conclusion f2 = mono . f1 is
    // representational equality
    if (f1 != f2) {
      rep.pass = false;
      rep.detail = "pair (" + f1.str() + ", " + f2.str() +
                   ") violates f2 = mono(f1)";
      return rep;
    }
  }
  // totality: every carrier element is reachable as a left component
  const GradedCarrier& c = fam.carrier(eps, x);
  std::size_t lefts = 0;
  {
    std::set<Elem> ls;
    for (const auto& [a, _] : lift.pairs) ls.insert(a);
    lefts = ls.size();
  }
  if (lefts != c.subset().size()) {
    rep.pass = false;
    rep.detail = "lifting misses carrier elements (" +
                 std::to_string(lefts) + " of " +
                 std::to_string(c.subset().size()) + ")";
    return rep;
  }
  rep.pass = true;
  rep.detail = "free lifting of the diagonal equals the graph of the mono";
  return rep;
}

CompletenessReport verify_completeness(
    const ModelContext& mc, const std::vector<std::pair<Term, Term>>& corpus) {
  CompletenessReport rep;
  for (const auto& [m, n] : corpus) {
    EquivResult rr = equiv(mc, m, n, Mode::Refined);
    EquivResult ru = equiv(mc, m, n, Mode::Unrefined);
    if (!rr.jm.type.is_ground())
      throw TypeMismatch("completeness corpus requires ground types, got " +
                         rr.jm.type.str());
    CompletenessCase c;
    c.m = m;
    c.n = n;
    c.type = rr.jm.type;
    c.eps = rr.jm.eff;
    c.refined_equal = rr.equal;
    c.unrefined_equal = ru.equal;
    c.biconditional = (rr.equal == ru.equal);
    if (rr.equal)
      ++rep.equal_count;
    else
      ++rep.unequal_count;
    if (!c.biconditional) rep.all_ok = false;
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

}  // namespace effet
