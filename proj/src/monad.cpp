#include "effet/monad.hpp"

#include <algorithm>
#include <sstream>

namespace effet {

// ---- Monoid ----------------------------------------------------------------

void Monoid::check_laws() const {
  if (!carrier.contains(unit))
    throw MonoidLawViolation("unit is not a carrier element");
  for (const Elem& a : carrier.elems()) {
    if (times(unit, a) != a)
      throw MonoidLawViolation("left unit fails at " + a.str());
    if (times(a, unit) != a)
      throw MonoidLawViolation("right unit fails at " + a.str());
  }
  for (const Elem& a : carrier.elems())
    for (const Elem& b : carrier.elems())
      for (const Elem& c : carrier.elems())
        if (times(times(a, b), c) != times(a, times(b, c)))
          throw MonoidLawViolation("associativity fails at (" + a.str() +
                                   ", " + b.str() + ", " + c.str() + ")");
}

Monoid overwriting_monoid(const FinSetObj& locs, const FinSetObj& values) {
  FinSetObj cell = coproduct(terminal_obj(), values);
  FinSetObj carrier = exponential(locs, cell);
  Elem no_write = Elem::inl(Elem::star());
  std::vector<std::pair<Elem, Elem>> ents;
  for (const Elem& l : locs.elems()) ents.emplace_back(l, no_write);
  Elem unit = Elem::table(std::move(ents));
  FinFn mult(product(carrier, carrier), carrier, [&](const Elem& p) {
    const Elem& a = p.first();
    const Elem& b = p.second();
    std::vector<std::pair<Elem, Elem>> out;
    out.reserve(locs.size());
    for (const Elem& l : locs.elems()) {
      Elem bv = b.apply(l);
      out.emplace_back(l, bv != no_write ? bv : a.apply(l));
    }
    return Elem::table(std::move(out));
  });
  return Monoid{carrier, unit, std::move(mult)};
}

// ---- MonadModel base --------------------------------------------------------

FinSetObj MonadModel::carrier(const FinSetObj& x) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = carriers_.find(x);
    if (it != carriers_.end()) return it->second;
  }
  FinSetObj built = build_carrier(x);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, _] = carriers_.emplace(x, built);
  return it->second;
}

void MonadModel::for_each_carrier_elem(
    const FinSetObj& x, const std::function<void(const Elem&)>& f) const {
  FinSetObj tx = carrier(x);
  for (const Elem& t : tx.elems()) f(t);
}

Elem MonadModel::fmap(const FinSetObj& x, const FinSetObj& y, const Elem& t,
                      const ElemFn& f) const {
  return bind(x, y, t, [&](const Elem& v) { return unit(y, f(v)); });
}

Elem MonadModel::mult(const FinSetObj& x, const Elem& tt) const {
  return bind(carrier(x), x, tt, [](const Elem& t) { return t; });
}

void MonadModel::add_generic(GenericEffect g) {
  generics_.push_back(std::move(g));
  std::sort(generics_.begin(), generics_.end(),
            [](const GenericEffect& a, const GenericEffect& b) {
              return a.op < b.op;
            });
}

const GenericEffect& MonadModel::generic(const Ident& op) const {
  for (const auto& g : generics_)
    if (g.op == op) return g;
  throw UnknownOperation("model '" + name_ + "' has no operation '" + op +
                         "'");
}

bool MonadModel::has_generic(const Ident& op) const {
  for (const auto& g : generics_)
    if (g.op == op) return true;
  return false;
}

Elem MonadModel::generic_at(const Ident& op, const Elem& a) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = generic_memo_.find({op, a});
    if (it != generic_memo_.end()) return it->second;
  }
  Elem v = generic(op).fn(a);
  std::lock_guard<std::mutex> lock(mu_);
  generic_memo_.emplace(std::make_pair(op, a), v);
  return v;
}

void MonadModel::install_state_ops(const FinSetObj&, const FinSetObj&) {
  throw ConfigError("monad '" + name_ +
                    "' does not support the get/set operations");
}

FinFn MonadModel::unit_fn(const FinSetObj& x) const {
  return FinFn(x, carrier(x), [&](const Elem& v) { return unit(x, v); });
}

FinFn MonadModel::mult_fn(const FinSetObj& x) const {
  FinSetObj tx = carrier(x);
  return FinFn(carrier(tx), tx, [&](const Elem& tt) { return mult(x, tt); });
}

FinFn MonadModel::fmap_fn(const FinFn& f) const {
  return FinFn(carrier(f.dom()), carrier(f.cod()), [&](const Elem& t) {
    return fmap(f.dom(), f.cod(), t, [&](const Elem& v) { return f(v); });
  });
}

FinFn MonadModel::strength_fn(const FinSetObj& x, const FinSetObj& y) const {
  return FinFn(product(x, carrier(y)), carrier(product(x, y)),
               [&](const Elem& p) {
                 return strength(x, y, p.first(), p.second());
               });
}

FinFn MonadModel::generic_fn(const Ident& op) const {
  const GenericEffect& g = generic(op);
  return FinFn(g.arg, carrier(g.res),
               [&](const Elem& a) { return generic_at(op, a); });
}

FinFn MonadModel::bind_fn(const FinFn& k, const FinSetObj& x,
                          const FinSetObj& y) const {
  return FinFn(carrier(x), carrier(y), [&](const Elem& t) {
    return bind(x, y, t, [&](const Elem& v) { return k(v); });
  });
}

// ---- enumeration helpers ----------------------------------------------------

namespace {

std::optional<unsigned long long> mul_clamp(unsigned long long a,
                                            unsigned long long b) {
  if (a != 0 && b > (~0ull) / a) return std::nullopt;
  return a * b;
}

std::optional<unsigned long long> pow_clamp(unsigned long long b,
                                            unsigned long long e) {
  unsigned long long r = 1;
  for (unsigned long long i = 0; i < e; ++i) {
    auto m = mul_clamp(r, b);
    if (!m) return std::nullopt;
    r = *m;
  }
  return r;
}

/// Enumerates all tables keys -> vals via one reused scratch node.
void for_each_table_scratch(const FinSetObj& keys, const FinSetObj& vals,
                            const std::function<void(const Elem&)>& f) {
  if (keys.empty()) {
    f(Elem::table({}));
    return;
  }
  if (vals.empty()) return;
  const auto& ks = keys.elems();
  const auto& vs = vals.elems();
  ScratchTable scratch;
  {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(ks.size());
    for (const Elem& k : ks) ents.emplace_back(k, vs[0]);
    scratch.assign(std::move(ents));
  }
  std::vector<std::size_t> idx(ks.size(), 0);
  for (;;) {
    f(scratch.handle());
    std::size_t i = ks.size();
    for (;;) {
      if (i == 0) return;
      --i;
      if (++idx[i] < vs.size()) {
        scratch.set_value(i, vs[idx[i]]);
        break;
      }
      idx[i] = 0;
      scratch.set_value(i, vs[0]);
    }
  }
}

/// Enumerates all tables keys -> vals in canonical order.
void for_each_table(const FinSetObj& keys, const FinSetObj& vals,
                    const std::function<void(const Elem&)>& f) {
  if (keys.empty()) {
    f(Elem::table({}));
    return;
  }
  if (vals.empty()) return;
  std::vector<std::size_t> idx(keys.size(), 0);
  const auto& ks = keys.elems();
  const auto& vs = vals.elems();
  for (;;) {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
      ents.emplace_back(ks[i], vs[idx[i]]);
    f(Elem::table(std::move(ents)));
    std::size_t i = ks.size();
    for (;;) {
      if (i == 0) return;
      --i;
      if (++idx[i] < vs.size()) break;
      idx[i] = 0;
    }
  }
}

// ---- the five builtin models ----

class IdentityModel final : public MonadModel {
 public:
  IdentityModel() : MonadModel("identity") {}

  std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const override {
    return x.size();
  }
  void for_each_carrier_elem(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for (const Elem& e : x.elems()) f(e);
  }
  Elem unit(const FinSetObj&, const Elem& v) const override { return v; }
  Elem bind(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& k) const override {
    return k(t);
  }
  Elem fmap(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& f) const override {
    return f(t);
  }
  Elem mult(const FinSetObj&, const Elem& tt) const override { return tt; }
  Elem strength(const FinSetObj&, const FinSetObj&, const Elem& v,
                const Elem& t) const override {
    return Elem::pair(v, t);
  }
  bool primitive_mult() const override { return true; }

 private:
  FinSetObj build_carrier(const FinSetObj& x) const override { return x; }
};

class StateModel final : public MonadModel {
 public:
  explicit StateModel(FinSetObj s) : MonadModel("state"), s_(std::move(s)) {}

  std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const override {
    auto base = mul_clamp(s_.size(), x.size());
    if (!base) return std::nullopt;
    return pow_clamp(*base, s_.size());
  }

  void for_each_carrier_elem(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table(s_, product(s_, x), f);
  }
  void for_each_carrier_elem_scratch(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table_scratch(s_, product(s_, x), f);
  }

  Elem unit(const FinSetObj&, const Elem& v) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(s_.size());
    for (const Elem& s : s_.elems()) ents.emplace_back(s, Elem::pair(s, v));
    return Elem::table(std::move(ents));
  }

  Elem bind(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& k) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(s_.size());
    for (const Elem& s : s_.elems()) {
      Elem p = t.apply(s);           // (s', v)
      Elem u = k(p.second());        // T Y element
      ents.emplace_back(s, u.apply(p.first()));
    }
    return Elem::table(std::move(ents));
  }

  Elem fmap(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& f) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(s_.size());
    for (const Elem& s : s_.elems()) {
      Elem p = t.apply(s);
      ents.emplace_back(s, Elem::pair(p.first(), f(p.second())));
    }
    return Elem::table(std::move(ents));
  }

  Elem mult(const FinSetObj&, const Elem& tt) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(s_.size());
    for (const Elem& s : s_.elems()) {
      Elem p = tt.apply(s);  // (s', t)
      ents.emplace_back(s, p.second().apply(p.first()));
    }
    return Elem::table(std::move(ents));
  }

  Elem strength(const FinSetObj&, const FinSetObj&, const Elem& v,
                const Elem& t) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(s_.size());
    for (const Elem& s : s_.elems()) {
      Elem p = t.apply(s);
      ents.emplace_back(s, Elem::pair(p.first(), Elem::pair(v, p.second())));
    }
    return Elem::table(std::move(ents));
  }

  bool primitive_mult() const override { return true; }

  void install_state_ops(const FinSetObj& locs,
                         const FinSetObj& values) override {
    if (!(s_ == exponential(locs, values)))
      throw ConfigError("state object is not values^locs");
    add_generic(GenericEffect{
        "get", locs, values, [this](const Elem& l) {
          std::vector<std::pair<Elem, Elem>> ents;
          for (const Elem& s : s_.elems())
            ents.emplace_back(s, Elem::pair(s, s.apply(l)));
          return Elem::table(std::move(ents));
        }});
    add_generic(GenericEffect{
        "set", product(locs, values), terminal_obj(), [this](const Elem& a) {
          std::vector<std::pair<Elem, Elem>> ents;
          for (const Elem& s : s_.elems())
            ents.emplace_back(
                s, Elem::pair(s.with_entry(a.first(), a.second()),
                              Elem::star()));
          return Elem::table(std::move(ents));
        }});
  }

 private:
  FinSetObj s_;
  FinSetObj build_carrier(const FinSetObj& x) const override {
    return exponential(s_, product(s_, x));
  }
};

class ReaderModel final : public MonadModel {
 public:
  explicit ReaderModel(FinSetObj s) : MonadModel("reader"), s_(std::move(s)) {}

  std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const override {
    return pow_clamp(x.size(), s_.size());
  }
  void for_each_carrier_elem(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table(s_, x, f);
  }
  void for_each_carrier_elem_scratch(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table_scratch(s_, x, f);
  }
  Elem unit(const FinSetObj&, const Elem& v) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : s_.elems()) ents.emplace_back(s, v);
    return Elem::table(std::move(ents));
  }
  Elem bind(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& k) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : s_.elems())
      ents.emplace_back(s, k(t.apply(s)).apply(s));
    return Elem::table(std::move(ents));
  }
  Elem fmap(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& f) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : s_.elems()) ents.emplace_back(s, f(t.apply(s)));
    return Elem::table(std::move(ents));
  }
  Elem mult(const FinSetObj&, const Elem& tt) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : s_.elems())
      ents.emplace_back(s, tt.apply(s).apply(s));
    return Elem::table(std::move(ents));
  }
  Elem strength(const FinSetObj&, const FinSetObj&, const Elem& v,
                const Elem& t) const override {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : s_.elems())
      ents.emplace_back(s, Elem::pair(v, t.apply(s)));
    return Elem::table(std::move(ents));
  }
  bool primitive_mult() const override { return true; }

  void install_state_ops(const FinSetObj& locs,
                         const FinSetObj& values) override {
    if (!(s_ == exponential(locs, values)))
      throw ConfigError("reader state object is not values^locs");
    add_generic(GenericEffect{
        "get", locs, values, [this](const Elem& l) {
          std::vector<std::pair<Elem, Elem>> ents;
          for (const Elem& s : s_.elems()) ents.emplace_back(s, s.apply(l));
          return Elem::table(std::move(ents));
        }});
  }

 private:
  FinSetObj s_;
  FinSetObj build_carrier(const FinSetObj& x) const override {
    return exponential(s_, x);
  }
};

class WriterModel final : public MonadModel {
 public:
  explicit WriterModel(Monoid m) : MonadModel("writer"), m_(std::move(m)) {
    m_.check_laws();
  }

  std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const override {
    return mul_clamp(m_.carrier.size(), x.size());
  }
  void for_each_carrier_elem(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for (const Elem& w : m_.carrier.elems())
      for (const Elem& v : x.elems()) f(Elem::pair(w, v));
  }
  Elem unit(const FinSetObj&, const Elem& v) const override {
    return Elem::pair(m_.unit, v);
  }
  Elem bind(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& k) const override {
    Elem u = k(t.second());
    return Elem::pair(m_.times(t.first(), u.first()), u.second());
  }
  Elem fmap(const FinSetObj&, const FinSetObj&, const Elem& t,
            const ElemFn& f) const override {
    return Elem::pair(t.first(), f(t.second()));
  }
  Elem mult(const FinSetObj&, const Elem& tt) const override {
    return Elem::pair(m_.times(tt.first(), tt.second().first()),
                      tt.second().second());
  }
  Elem strength(const FinSetObj&, const FinSetObj&, const Elem& v,
                const Elem& t) const override {
    return Elem::pair(t.first(), Elem::pair(v, t.second()));
  }
  bool primitive_mult() const override { return true; }

  void install_state_ops(const FinSetObj& locs,
                         const FinSetObj& values) override {
    FinSetObj expect = exponential(locs, coproduct(terminal_obj(), values));
    if (!(m_.carrier == expect))
      throw ConfigError(
          "writer monoid is not the overwriting monoid over locs/values");
    FinSetObj locs_copy = locs;
    add_generic(GenericEffect{
        "set", product(locs, values), terminal_obj(),
        [this, locs_copy](const Elem& a) {
          std::vector<std::pair<Elem, Elem>> ents;
          for (const Elem& l : locs_copy.elems())
            ents.emplace_back(l, l == a.first()
                                     ? Elem::inr(a.second())
                                     : Elem::inl(Elem::star()));
          return Elem::pair(Elem::table(std::move(ents)), Elem::star());
        }});
  }

  const Monoid& monoid() const { return m_; }

 private:
  Monoid m_;
  FinSetObj build_carrier(const FinSetObj& x) const override {
    return product(m_.carrier, x);
  }
};

class ContStateModel final : public MonadModel {
 public:
  ContStateModel(FinSetObj r, FinSetObj s)
      : MonadModel("cont_state"), r_(std::move(r)), s_(std::move(s)) {}

  FinSetObj kont_obj(const FinSetObj& x) const {
    std::lock_guard<std::mutex> lock(kmu_);
    auto it = konts_.find(x);
    if (it != konts_.end()) return it->second;
    FinSetObj k = exponential(xs_obj_unlocked(x), r_);
    konts_.emplace(x, k);
    return k;
  }
  FinSetObj xs_obj(const FinSetObj& x) const {
    std::lock_guard<std::mutex> lock(kmu_);
    return xs_obj_unlocked(x);
  }
  FinSetObj ans_obj() const { return exponential(s_, r_); }

  std::optional<unsigned long long> carrier_count(
      const FinSetObj& x) const override {
    auto ans = pow_clamp(r_.size(), s_.size());
    auto xs = mul_clamp(x.size(), s_.size());
    if (!ans || !xs) return std::nullopt;
    auto konts = pow_clamp(r_.size(), *xs);
    if (!konts) return std::nullopt;
    return pow_clamp(*ans, *konts);
  }

  void for_each_carrier_elem(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table(kont_obj(x), ans_obj(), f);
  }
  void for_each_carrier_elem_scratch(
      const FinSetObj& x,
      const std::function<void(const Elem&)>& f) const override {
    for_each_table_scratch(kont_obj(x), ans_obj(), f);
  }

  Elem unit(const FinSetObj& x, const Elem& v) const override {
    std::vector<std::pair<Elem, Elem>> outer;
    FinSetObj ks = kont_obj(x);
    for (const Elem& k : ks.elems()) {
      std::vector<std::pair<Elem, Elem>> inner;
      for (const Elem& s : s_.elems())
        inner.emplace_back(s, k.apply(Elem::pair(v, s)));
      outer.emplace_back(k, Elem::table(std::move(inner)));
    }
    return Elem::table(std::move(outer));
  }

  Elem bind(const FinSetObj& x, const FinSetObj& y, const Elem& t,
            const ElemFn& k) const override {
    FinSetObj ky_obj = kont_obj(y);
    FinSetObj xs = xs_obj(x);
    std::unordered_map<Elem, Elem, ElemHash> kmemo;
    auto kv = [&](const Elem& v) {
      auto it = kmemo.find(v);
      if (it != kmemo.end()) return it->second;
      Elem u = k(v);
      kmemo.emplace(v, u);
      return u;
    };
    std::vector<std::pair<Elem, Elem>> outer;
    outer.reserve(ky_obj.size());
    for (const Elem& ky : ky_obj.elems()) {
      std::vector<std::pair<Elem, Elem>> inner;
      inner.reserve(xs.size());
      for (const Elem& p : xs.elems())
        inner.emplace_back(p, kv(p.first()).apply(ky).apply(p.second()));
      outer.emplace_back(ky, t.apply(Elem::table(std::move(inner))));
    }
    return Elem::table(std::move(outer));
  }

  Elem fmap(const FinSetObj& x, const FinSetObj& y, const Elem& t,
            const ElemFn& f) const override {
    FinSetObj ky_obj = kont_obj(y);
    FinSetObj xs = xs_obj(x);
    std::vector<std::pair<Elem, Elem>> outer;
    outer.reserve(ky_obj.size());
    for (const Elem& ky : ky_obj.elems()) {
      std::vector<std::pair<Elem, Elem>> inner;
      inner.reserve(xs.size());
      for (const Elem& p : xs.elems())
        inner.emplace_back(p, ky.apply(Elem::pair(f(p.first()), p.second())));
      outer.emplace_back(ky, t.apply(Elem::table(std::move(inner))));
    }
    return Elem::table(std::move(outer));
  }

  Elem strength(const FinSetObj& x, const FinSetObj& y, const Elem& v,
                const Elem& t) const override {
    FinSetObj kxy_obj = kont_obj(product(x, y));
    FinSetObj ys = xs_obj(y);
    std::vector<std::pair<Elem, Elem>> outer;
    outer.reserve(kxy_obj.size());
    for (const Elem& kxy : kxy_obj.elems()) {
      std::vector<std::pair<Elem, Elem>> inner;
      inner.reserve(ys.size());
      for (const Elem& p : ys.elems())
        inner.emplace_back(
            p, kxy.apply(Elem::pair(Elem::pair(v, p.first()), p.second())));
      outer.emplace_back(kxy, t.apply(Elem::table(std::move(inner))));
    }
    return Elem::table(std::move(outer));
  }

  bool primitive_bind() const override { return true; }
  bool elementwise_needs_objects() const override { return true; }

  void install_state_ops(const FinSetObj& locs,
                         const FinSetObj& values) override {
    if (!(s_ == exponential(locs, values)))
      throw ConfigError("cont_state state object is not values^locs");
    FinSetObj vk = kont_obj(values);
    add_generic(GenericEffect{"get", locs, values, [this, vk](const Elem& l) {
                                std::vector<std::pair<Elem, Elem>> outer;
                                for (const Elem& k : vk.elems()) {
                                  std::vector<std::pair<Elem, Elem>> inner;
                                  for (const Elem& s : s_.elems())
                                    inner.emplace_back(
                                        s,
                                        k.apply(Elem::pair(s.apply(l), s)));
                                  outer.emplace_back(
                                      k, Elem::table(std::move(inner)));
                                }
                                return Elem::table(std::move(outer));
                              }});
    FinSetObj uk = kont_obj(terminal_obj());
    add_generic(GenericEffect{
        "set", product(locs, values), terminal_obj(),
        [this, uk](const Elem& a) {
          std::vector<std::pair<Elem, Elem>> outer;
          for (const Elem& k : uk.elems()) {
            std::vector<std::pair<Elem, Elem>> inner;
            for (const Elem& s : s_.elems())
              inner.emplace_back(
                  s, k.apply(Elem::pair(
                         Elem::star(),
                         s.with_entry(a.first(), a.second()))));
            outer.emplace_back(k, Elem::table(std::move(inner)));
          }
          return Elem::table(std::move(outer));
        }});
  }

 private:
  FinSetObj r_, s_;
  mutable std::mutex kmu_;
  mutable std::unordered_map<FinSetObj, FinSetObj, FinSetObjHash> konts_;
  mutable std::unordered_map<FinSetObj, FinSetObj, FinSetObjHash> xss_;

  FinSetObj xs_obj_unlocked(const FinSetObj& x) const {
    auto it = xss_.find(x);
    if (it != xss_.end()) return it->second;
    FinSetObj p = product(x, s_);
    xss_.emplace(x, p);
    return p;
  }

  FinSetObj build_carrier(const FinSetObj& x) const override {
    return exponential(kont_obj(x), ans_obj());
  }
};

}  // namespace

std::shared_ptr<MonadModel> identity_monad() {
  return std::make_shared<IdentityModel>();
}
std::shared_ptr<MonadModel> state_monad(const FinSetObj& s) {
  return std::make_shared<StateModel>(s);
}
std::shared_ptr<MonadModel> reader_monad(const FinSetObj& s) {
  return std::make_shared<ReaderModel>(s);
}
std::shared_ptr<MonadModel> writer_monad(const Monoid& m) {
  return std::make_shared<WriterModel>(m);
}
std::shared_ptr<MonadModel> cont_state_monad(const FinSetObj& r,
                                             const FinSetObj& s) {
  return std::make_shared<ContStateModel>(r, s);
}

// ---- algebraic operations <-> generic effects -----------------------------

FinFn generic_to_algebraic(const MonadModel& t, const Ident& op,
                           const FinSetObj& x) {
  const GenericEffect& g = t.generic(op);
  FinSetObj tx = t.carrier(x);
  FinSetObj dom = exponential(g.res, tx);
  FinSetObj cod = exponential(g.arg, tx);
  return FinFn(dom, cod, [&t, &op, g, x](const Elem& ktbl) {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(g.arg.size());
    for (const Elem& a : g.arg.elems()) {
      Elem r = t.bind(g.res, x, t.generic_at(op, a),
                      [&](const Elem& b) { return ktbl.apply(b); });
      ents.emplace_back(a, r);
    }
    return Elem::table(std::move(ents));
  });
}

FinFn algebraic_to_generic(const MonadModel& t, const Ident& op) {
  const GenericEffect& g = t.generic(op);
  FinFn alpha = generic_to_algebraic(t, op, g.res);
  std::vector<std::pair<Elem, Elem>> ents;
  for (const Elem& b : g.res.elems()) ents.emplace_back(b, t.unit(g.res, b));
  Elem unit_kont = Elem::table(std::move(ents));
  Elem recovered = alpha(unit_kont);
  return FinFn(g.arg, t.carrier(g.res),
               [recovered](const Elem& a) { return recovered.apply(a); });
}

// ---- law checking -----------------------------------------------------------

bool LawReport::all_pass() const {
  for (const auto& r : results)
    if (r.status == LawStatus::Fail) return false;
  return true;
}

unsigned long long LawReport::total_checked() const {
  unsigned long long n = 0;
  for (const auto& r : results) n += r.checked;
  return n;
}

std::string LawReport::summary() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.status == LawStatus::Pass
               ? "pass"
               : r.status == LawStatus::Fail ? "FAIL" : "skip")
       << "  " << r.law << "  [" << r.scope << "]";
    if (r.status == LawStatus::Pass) os << " (" << r.checked << " checked)";
    if (!r.detail.empty()) os << "  " << r.detail;
    os << "\n";
  }
  return os.str();
}

namespace {

struct LawRun {
  const MonadModel& t;
  const LawOptions& opts;
  LawReport report;

  void add(const std::string& law, const std::string& scope, LawStatus st,
           unsigned long long checked, const std::string& detail = "") {
    report.results.push_back(LawResult{law, scope, st, checked, detail});
  }

  /// Materialises T X as a vector when it fits `cap`, else nullopt.
  std::optional<std::vector<Elem>> carrier_vec(const FinSetObj& x,
                                               unsigned long long cap) {
    auto cnt = t.carrier_count(x);
    if (!cnt || *cnt > cap) return std::nullopt;
    std::vector<Elem> out;
    out.reserve(*cnt);
    try {
      t.for_each_carrier_elem(x, [&](const Elem& e) { out.push_back(e); });
    } catch (const SizeLimitExceeded&) {
      return std::nullopt;
    }
    return out;
  }

  /// All tables dom -> values drawn from `vals`, as ElemFn-compatible
  /// vectors of choices; calls f with the table elem.
  static void for_each_fn_table(const FinSetObj& dom,
                                const std::vector<Elem>& vals,
                                const std::function<void(const Elem&)>& f) {
    if (dom.empty()) {
      f(Elem::table({}));
      return;
    }
    if (vals.empty()) return;
    std::vector<std::size_t> idx(dom.size(), 0);
    for (;;) {
      std::vector<std::pair<Elem, Elem>> ents;
      ents.reserve(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i)
        ents.emplace_back(dom.elems()[i], vals[idx[i]]);
      f(Elem::table(std::move(ents)));
      std::size_t i = dom.size();
      for (;;) {
        if (i == 0) return;
        --i;
        if (++idx[i] < vals.size()) break;
        idx[i] = 0;
      }
    }
  }

  std::string obj_scope(const FinSetObj& x) {
    return t.name() + ", |X|=" + std::to_string(x.size());
  }
  std::string obj_scope2(const FinSetObj& x, const FinSetObj& y) {
    return t.name() + ", |X|=" + std::to_string(x.size()) +
           ", |Y|=" + std::to_string(y.size());
  }

  void functor_identity(const FinSetObj& x) {
    auto cnt = t.carrier_count(x);
    if (!cnt || *cnt > opts.max_iterations) {
      add("functor identity", obj_scope(x), LawStatus::Skipped, 0,
          "carrier not enumerable within budget");
      return;
    }
    unsigned long long n = 0;
    std::string bad;
    try {
      t.for_each_carrier_elem_scratch(x, [&](const Elem& e) {
        ++n;
        if (bad.empty() &&
            Elem::cmp(t.fmap(x, x, e, [](const Elem& v) { return v; }), e) !=
                0)
          bad = "fmap id /= id at " + e.str();
      });
    } catch (const SizeLimitExceeded& ex) {
      add("functor identity", obj_scope(x), LawStatus::Skipped, 0, ex.what());
      return;
    }
    add("functor identity", obj_scope(x),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void right_unit(const FinSetObj& x) {
    auto cnt = t.carrier_count(x);
    if (!cnt || *cnt > opts.max_iterations) {
      add("right unit", obj_scope(x), LawStatus::Skipped, 0,
          "carrier not enumerable within budget");
      return;
    }
    unsigned long long n = 0;
    std::string bad;
    try {
      t.for_each_carrier_elem_scratch(x, [&](const Elem& e) {
        ++n;
        if (bad.empty() &&
            Elem::cmp(t.bind(x, x, e,
                             [&](const Elem& v) { return t.unit(x, v); }),
                      e) != 0)
          bad = "bind(t, unit) /= t at " + e.str();
      });
    } catch (const SizeLimitExceeded& ex) {
      add("right unit", obj_scope(x), LawStatus::Skipped, 0, ex.what());
      return;
    }
    add("right unit", obj_scope(x),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void left_unit(const FinSetObj& x, const FinSetObj& y) {
    auto ty = carrier_vec(y, 1 << 14);
    if (!ty) {
      add("left unit", obj_scope2(x, y), LawStatus::Skipped, 0,
          "T Y not enumerable within budget");
      return;
    }
    auto tuples = pow_clamp(ty->size(), x.size());
    if (!tuples || *tuples > (1ull << 20)) {
      add("left unit", obj_scope2(x, y), LawStatus::Skipped, 0,
          "continuation space too large");
      return;
    }
    unsigned long long n = 0;
    std::string bad;
    for_each_fn_table(x, *ty, [&](const Elem& ktbl) {
      if (!bad.empty()) return;
      for (const Elem& v : x.elems()) {
        ++n;
        Elem lhs = t.bind(x, y, t.unit(x, v),
                          [&](const Elem& u) { return ktbl.apply(u); });
        if (lhs != ktbl.apply(v)) {
          bad = "bind(unit " + v.str() + ", k) /= k(" + v.str() + ")";
          return;
        }
      }
    });
    add("left unit", obj_scope2(x, y),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void associativity(const FinSetObj& x) {
    // Preferred route: the mult square on T^3 X, streamed lazily.
    try {
      FinSetObj tx = t.carrier(x);
      FinSetObj t2 = t.carrier(tx);
      auto cnt3 = t.carrier_count(t2);
      if (cnt3 && *cnt3 <= opts.max_iterations) {
        unsigned long long n = 0;
        std::string bad;
        t.for_each_carrier_elem_scratch(t2, [&](const Elem& t3) {
          ++n;
          if (!bad.empty()) return;
          Elem lhs = t.mult(x, t.mult(tx, t3));
          Elem rhs = t.mult(
              x, t.fmap(t2, tx, t3,
                        [&](const Elem& u) { return t.mult(x, u); }));
          if (lhs != rhs) bad = "mult associativity fails";
        });
        add("associativity (mult route)", obj_scope(x),
            bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
        return;
      }
    } catch (const SizeLimitExceeded&) {
      // fall through to the bind route
    }
    // Fallback for one-point objects: Kleisli composition is a monoid on
    // T X, so associativity is a finite multiplication-table check.
    if (x.size() == 1) {
      auto tx = carrier_vec(x, 1 << 12);
      if (tx) {
        std::size_t n = tx->size();
        std::unordered_map<Elem, std::size_t, ElemHash> index;
        for (std::size_t i = 0; i < n; ++i) index.emplace((*tx)[i], i);
        std::vector<std::size_t> b(n * n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            Elem r = t.bind(x, x, (*tx)[i],
                            [&](const Elem&) { return (*tx)[j]; });
            b[i * n + j] = index.at(r);
          }
        std::string bad;
        unsigned long long checked = 0;
        for (std::size_t i = 0; i < n && bad.empty(); ++i)
          for (std::size_t j = 0; j < n && bad.empty(); ++j)
            for (std::size_t k = 0; k < n; ++k) {
              ++checked;
              if (b[b[i * n + j] * n + k] != b[i * n + b[j * n + k]]) {
                bad = "Kleisli associativity fails";
                break;
              }
            }
        add("associativity (bind route, |X|=1)", obj_scope(x),
            bad.empty() ? LawStatus::Pass : LawStatus::Fail, checked, bad);
        return;
      }
    }
    add("associativity", obj_scope(x), LawStatus::Skipped, 0,
        "T^3 X not representable and |X| > 1");
  }

  void unit_naturality(const FinSetObj& x, const FinSetObj& y) {
    auto fn_count = pow_clamp(y.size(), x.size());
    if (!fn_count || *fn_count > (1ull << 16)) {
      add("unit naturality", obj_scope2(x, y), LawStatus::Skipped, 0,
          "function space too large");
      return;
    }
    unsigned long long n = 0;
    std::string bad;
    std::vector<Elem> yv(y.elems());
    for_each_fn_table(x, yv, [&](const Elem& ftbl) {
      if (!bad.empty()) return;
      for (const Elem& v : x.elems()) {
        ++n;
        Elem lhs = t.fmap(x, y, t.unit(x, v),
                          [&](const Elem& u) { return ftbl.apply(u); });
        if (lhs != t.unit(y, ftbl.apply(v))) {
          bad = "T f . unit /= unit . f";
          return;
        }
      }
    });
    add("unit naturality", obj_scope2(x, y),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void mult_naturality(const FinSetObj& x, const FinSetObj& y) {
    auto fn_count = pow_clamp(y.size(), x.size());
    if (!fn_count || *fn_count > (1ull << 10)) {
      add("mult naturality", obj_scope2(x, y), LawStatus::Skipped, 0,
          "function space too large");
      return;
    }
    try {
      FinSetObj tx = t.carrier(x);
      FinSetObj ty = t.carrier(y);
      auto cnt2 = t.carrier_count(tx);
      if (!cnt2 || *cnt2 * *fn_count > opts.max_iterations) {
        add("mult naturality", obj_scope2(x, y), LawStatus::Skipped, 0,
            "T^2 X not enumerable within budget");
        return;
      }
      unsigned long long n = 0;
      std::string bad;
      std::vector<Elem> yv(y.elems());
      for_each_fn_table(x, yv, [&](const Elem& ftbl) {
        if (!bad.empty()) return;
        ElemFn f = [&](const Elem& u) { return ftbl.apply(u); };
        t.for_each_carrier_elem_scratch(tx, [&](const Elem& t2) {
          ++n;
          if (!bad.empty()) return;
          Elem lhs = t.fmap(x, y, t.mult(x, t2), f);
          Elem rhs = t.mult(
              y, t.fmap(tx, ty, t2,
                        [&](const Elem& u) { return t.fmap(x, y, u, f); }));
          if (lhs != rhs) bad = "mult is not natural";
        });
      });
      add("mult naturality", obj_scope2(x, y),
          bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
    } catch (const SizeLimitExceeded& ex) {
      add("mult naturality", obj_scope2(x, y), LawStatus::Skipped, 0,
          ex.what());
    }
  }

  void strength_unit(const FinSetObj& x, const FinSetObj& y) {
    FinSetObj xy = product(x, y);
    unsigned long long n = 0;
    std::string bad;
    for (const Elem& v : x.elems()) {
      for (const Elem& w : y.elems()) {
        ++n;
        try {
          if (t.strength(x, y, v, t.unit(y, w)) !=
              t.unit(xy, Elem::pair(v, w))) {
            bad = "strength(x, unit y) /= unit (x, y)";
            break;
          }
        } catch (const SizeLimitExceeded& ex) {
          add("strength unit", obj_scope2(x, y), LawStatus::Skipped, n,
              ex.what());
          return;
        }
      }
      if (!bad.empty()) break;
    }
    add("strength unit", obj_scope2(x, y),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void strength_proj(const FinSetObj& x, const FinSetObj& y) {
    auto cnt = t.carrier_count(y);
    if (!cnt || *cnt * x.size() > opts.max_iterations) {
      add("strength projection", obj_scope2(x, y), LawStatus::Skipped, 0,
          "T Y not enumerable within budget");
      return;
    }
    unsigned long long n = 0;
    std::string bad;
    FinSetObj xy = product(x, y);
    try {
      t.for_each_carrier_elem_scratch(y, [&](const Elem& u) {
        if (!bad.empty()) return;
        for (const Elem& v : x.elems()) {
          ++n;
          Elem lhs = t.fmap(xy, y, t.strength(x, y, v, u),
                            [](const Elem& p) { return p.second(); });
          if (Elem::cmp(lhs, u) != 0) {
            bad = "T(snd) . strength /= snd";
            return;
          }
        }
      });
    } catch (const SizeLimitExceeded& ex) {
      add("strength projection", obj_scope2(x, y), LawStatus::Skipped, n,
          ex.what());
      return;
    }
    add("strength projection", obj_scope2(x, y),
        bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
  }

  void strength_mult(const FinSetObj& x, const FinSetObj& y) {
    try {
      FinSetObj ty = t.carrier(y);
      auto cnt2 = t.carrier_count(ty);
      if (!cnt2 || *cnt2 * x.size() > opts.max_iterations) {
        add("strength/mult coherence", obj_scope2(x, y), LawStatus::Skipped,
            0, "T^2 Y not enumerable within budget");
        return;
      }
      FinSetObj xy = product(x, y);
      FinSetObj x_ty = product(x, ty);
      unsigned long long n = 0;
      std::string bad;
      t.for_each_carrier_elem_scratch(ty, [&](const Elem& tt) {
        if (!bad.empty()) return;
        for (const Elem& v : x.elems()) {
          ++n;
          Elem lhs = t.strength(x, y, v, t.mult(y, tt));
          Elem rhs = t.mult(
              xy, t.fmap(x_ty, xy, t.strength(x, ty, v, tt),
                         [&](const Elem& p) {
                           return t.strength(x, y, p.first(), p.second());
                         }));
          if (lhs != rhs) {
            bad = "strength . (id x mult) /= mult . T(strength) . strength";
            return;
          }
        }
      });
      add("strength/mult coherence", obj_scope2(x, y),
          bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
    } catch (const SizeLimitExceeded& ex) {
      add("strength/mult coherence", obj_scope2(x, y), LawStatus::Skipped, 0,
          ex.what());
    }
  }

  /// Kleisli bind against the strong-monad route mult . T(eval) . strength;
  /// the content of the coincidence of the two presentations.
  void bind_coincidence(const FinSetObj& x, const FinSetObj& y) {
    try {
      FinSetObj ty = t.carrier(y);
      auto tuples = pow_clamp(ty.size(), x.size());
      auto cntx = t.carrier_count(x);
      if (!tuples || !cntx || *tuples * *cntx > (1ull << 21)) {
        add("Kleisli/strong bind coincidence", obj_scope2(x, y),
            LawStatus::Skipped, 0, "quantification too large");
        return;
      }
      FinSetObj kx = exponential(x, ty);
      FinSetObj kx_x = product(kx, x);
      std::vector<Elem> txv;
      t.for_each_carrier_elem(x, [&](const Elem& e) { txv.push_back(e); });
      unsigned long long n = 0;
      std::string bad;
      for (const Elem& ktbl : kx.elems()) {
        if (!bad.empty()) break;
        ElemFn k = [&](const Elem& v) { return ktbl.apply(v); };
        for (const Elem& tv : txv) {
          ++n;
          Elem direct = t.bind(x, y, tv, k);
          Elem s1 = t.strength(kx, x, ktbl, tv);
          Elem s2 = t.fmap(kx_x, ty, s1,
                           [](const Elem& p) { return p.first().apply(p.second()); });
          Elem strong = t.mult(y, s2);
          if (direct != strong) {
            bad = "bind /= mult . T(eval) . strength at " + tv.str();
            break;
          }
        }
      }
      add("Kleisli/strong bind coincidence", obj_scope2(x, y),
          bad.empty() ? LawStatus::Pass : LawStatus::Fail, n, bad);
    } catch (const SizeLimitExceeded& ex) {
      add("Kleisli/strong bind coincidence", obj_scope2(x, y),
          LawStatus::Skipped, 0, ex.what());
    }
  }
};

}  // namespace

LawReport check_monad_laws(const MonadModel& t,
                           const std::vector<FinSetObj>& objects,
                           const LawOptions& opts) {
  LawRun run{t, opts, {}};
  for (const FinSetObj& x : objects) {
    run.functor_identity(x);
    run.right_unit(x);
    run.associativity(x);
  }
  for (const FinSetObj& x : objects)
    for (const FinSetObj& y : objects) {
      run.unit_naturality(x, y);
      run.left_unit(x, y);
      run.mult_naturality(x, y);
      run.strength_unit(x, y);
      run.strength_proj(x, y);
      run.strength_mult(x, y);
      run.bind_coincidence(x, y);
    }
  return run.report;
}

}  // namespace effet

