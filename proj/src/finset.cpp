#include "effet/finset.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace effet {

namespace {
std::atomic<std::size_t> g_size_limit{1'000'000};
}

std::size_t size_limit() { return g_size_limit.load(); }
void set_size_limit(std::size_t n) { g_size_limit.store(n); }

static void check_slots(unsigned long long slots, const char* what) {
  if (slots > g_size_limit.load())
    throw SizeLimitExceeded(std::string(what) + " needs " +
                            std::to_string(slots) +
                            " element-slots, limit is " +
                            std::to_string(g_size_limit.load()));
}

// ---- FinSetObj -----------------------------------------------------------

struct FinSetObj::Data {
  std::vector<Elem> elems;
  std::unordered_map<Elem, std::size_t, ElemHash> index;
  std::size_t h = 0;
};

static std::shared_ptr<const FinSetObj::Data> make_data(
    std::vector<Elem> elems) {
  auto d = std::make_shared<FinSetObj::Data>();
  d->elems = std::move(elems);
  d->index.reserve(d->elems.size() * 2);
  std::size_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < d->elems.size(); ++i) {
    d->index.emplace(d->elems[i], i);
    h ^= d->elems[i].hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  d->h = h;
  return d;
}

FinSetObj::FinSetObj() : d_(make_data({})) {}

FinSetObj FinSetObj::from_elems(std::vector<Elem> elems) {
  std::sort(elems.begin(), elems.end(),
            [](const Elem& a, const Elem& b) { return Elem::cmp(a, b) < 0; });
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  check_slots(elems.size(), "object");
  FinSetObj o;
  o.d_ = make_data(std::move(elems));
  return o;
}

FinSetObj FinSetObj::from_sorted(std::vector<Elem> elems) {
  check_slots(elems.size(), "object");
  FinSetObj o;
  o.d_ = make_data(std::move(elems));
  return o;
}

std::size_t FinSetObj::size() const { return d_->elems.size(); }
const std::vector<Elem>& FinSetObj::elems() const { return d_->elems; }

bool FinSetObj::contains(const Elem& e) const {
  return d_->index.count(e) != 0;
}

std::size_t FinSetObj::index_of(const Elem& e) const {
  auto it = d_->index.find(e);
  if (it == d_->index.end())
    throw InternalError("element " + e.str() + " not in object " + str());
  return it->second;
}

bool FinSetObj::operator==(const FinSetObj& o) const {
  return d_ == o.d_ || d_->elems == o.d_->elems;
}

std::size_t FinSetObj::hash() const { return d_->h; }

std::string FinSetObj::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < d_->elems.size(); ++i) {
    if (i) os << ", ";
    if (i >= 16) {
      os << "... (" << d_->elems.size() << " elements)";
      break;
    }
    os << d_->elems[i].str();
  }
  os << "]";
  return os.str();
}

// ---- FinFn ---------------------------------------------------------------

FinFn::FinFn(FinSetObj dom, FinSetObj cod, const ElemFn& f)
    : dom_(std::move(dom)), cod_(std::move(cod)) {
  auto vals = std::make_shared<std::vector<Elem>>();
  vals->reserve(dom_.size());
  for (const Elem& x : dom_.elems()) {
    Elem y = f(x);
    if (!cod_.contains(y))
      throw InternalError("function value " + y.str() + " at " + x.str() +
                          " lies outside the declared codomain");
    vals->push_back(y);
  }
  vals_ = std::move(vals);
}

FinFn FinFn::from_values(FinSetObj dom, FinSetObj cod,
                         std::vector<Elem> vals) {
  if (vals.size() != dom.size())
    throw InternalError("table length mismatch");
  std::size_t i = 0;
  return FinFn(std::move(dom), std::move(cod),
               [&vals, &i](const Elem&) { return vals[i++]; });
}

FinFn FinFn::identity(const FinSetObj& x) {
  return FinFn(x, x, [](const Elem& e) { return e; });
}

FinFn FinFn::constant(const FinSetObj& dom, const FinSetObj& cod, Elem v) {
  return FinFn(dom, cod, [&v](const Elem&) { return v; });
}

FinFn FinFn::inclusion(const FinSetObj& sub, const FinSetObj& super) {
  return FinFn(sub, super, [](const Elem& e) { return e; });
}

const FinSetObj& FinFn::dom() const { return dom_; }
const FinSetObj& FinFn::cod() const { return cod_; }
const std::vector<Elem>& FinFn::values() const { return *vals_; }

Elem FinFn::operator()(const Elem& x) const {
  return (*vals_)[dom_.index_of(x)];
}

FinFn FinFn::then(const FinFn& g) const {
  if (!(cod_ == g.dom()))
    throw InternalError("composition domain mismatch");
  return FinFn(dom_, g.cod(), [&](const Elem& x) { return g((*this)(x)); });
}

bool FinFn::surjective() const {
  std::unordered_set<Elem, ElemHash> seen(vals_->begin(), vals_->end());
  return seen.size() == cod_.size();
}

bool FinFn::injective() const {
  std::unordered_set<Elem, ElemHash> seen;
  for (const Elem& v : *vals_)
    if (!seen.insert(v).second) return false;
  return true;
}

FinSetObj FinFn::image() const {
  return FinSetObj::from_elems(*vals_);
}

Elem FinFn::as_table_elem() const {
  std::vector<std::pair<Elem, Elem>> ents;
  ents.reserve(dom_.size());
  for (std::size_t i = 0; i < dom_.size(); ++i)
    ents.emplace_back(dom_.elems()[i], (*vals_)[i]);
  return Elem::table(std::move(ents));
}

bool FinFn::operator==(const FinFn& o) const {
  return dom_ == o.dom_ && cod_ == o.cod_ &&
         (vals_ == o.vals_ || *vals_ == *o.vals_);
}

std::string FinFn::str() const { return as_table_elem().str(); }

// ---- bicartesian closed structure ---------------------------------------

FinSetObj terminal_obj() {
  return FinSetObj::from_sorted({Elem::star()});
}

FinSetObj initial_obj() { return FinSetObj(); }

FinSetObj product(const FinSetObj& x, const FinSetObj& y) {
  check_slots(static_cast<unsigned long long>(x.size()) * y.size(),
              "product");
  std::vector<Elem> es;
  es.reserve(x.size() * y.size());
  for (const Elem& a : x.elems())
    for (const Elem& b : y.elems()) es.push_back(Elem::pair(a, b));
  // x and y are sorted, so pairs come out in structural order.
  return FinSetObj::from_sorted(std::move(es));
}

FinFn proj1(const FinSetObj& x, const FinSetObj& y) {
  return FinFn(product(x, y), x, [](const Elem& p) { return p.first(); });
}

FinFn proj2(const FinSetObj& x, const FinSetObj& y) {
  return FinFn(product(x, y), y, [](const Elem& p) { return p.second(); });
}

FinFn pair_fn(const FinFn& f, const FinFn& g) {
  if (!(f.dom() == g.dom())) throw InternalError("pairing domain mismatch");
  return FinFn(f.dom(), product(f.cod(), g.cod()),
               [&](const Elem& z) { return Elem::pair(f(z), g(z)); });
}

FinFn product_fn(const FinFn& f, const FinFn& g) {
  return FinFn(product(f.dom(), g.dom()), product(f.cod(), g.cod()),
               [&](const Elem& p) {
                 return Elem::pair(f(p.first()), g(p.second()));
               });
}

FinSetObj coproduct(const FinSetObj& x, const FinSetObj& y) {
  check_slots(static_cast<unsigned long long>(x.size()) + y.size(),
              "coproduct");
  std::vector<Elem> es;
  es.reserve(x.size() + y.size());
  for (const Elem& a : x.elems()) es.push_back(Elem::inl(a));
  for (const Elem& b : y.elems()) es.push_back(Elem::inr(b));
  return FinSetObj::from_sorted(std::move(es));
}

FinFn inl_fn(const FinSetObj& x, const FinSetObj& y) {
  return FinFn(x, coproduct(x, y), [](const Elem& a) { return Elem::inl(a); });
}

FinFn inr_fn(const FinSetObj& x, const FinSetObj& y) {
  return FinFn(y, coproduct(x, y), [](const Elem& b) { return Elem::inr(b); });
}

FinFn copair_fn(const FinFn& f, const FinFn& g) {
  if (!(f.cod() == g.cod())) throw InternalError("copairing codomain mismatch");
  return FinFn(coproduct(f.dom(), g.dom()), f.cod(), [&](const Elem& s) {
    return s.kind() == Elem::Kind::InjL ? f(s.inj_value()) : g(s.inj_value());
  });
}

static unsigned long long checked_pow(std::size_t base, std::size_t exp,
                                      const char* what) {
  unsigned long long r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > g_size_limit.load() * 2 + 2)
      throw SizeLimitExceeded(std::string(what) + " carrier too large");
    r *= base;
    if (base == 0) return 0;
  }
  return r;
}

FinSetObj exponential(const FinSetObj& x, const FinSetObj& y) {
  unsigned long long count = checked_pow(y.size(), x.size(), "exponential");
  unsigned long long slots = count * std::max<std::size_t>(1, x.size());
  check_slots(slots, "exponential");
  std::vector<Elem> es;
  es.reserve(count);
  const auto& keys = x.elems();
  const auto& vals = y.elems();
  if (keys.empty()) {
    es.push_back(Elem::table({}));
    return FinSetObj::from_sorted(std::move(es));
  }
  if (vals.empty()) return FinSetObj();  // no tables out of a nonempty set
  // Odometer with the rightmost key varying fastest: tables come out in
  // canonical (entry-lexicographic) order because keys are sorted.
  std::vector<std::size_t> idx(keys.size(), 0);
  for (;;) {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
      ents.emplace_back(keys[i], vals[idx[i]]);
    es.push_back(Elem::table(std::move(ents)));
    std::size_t i = keys.size();
    while (i > 0) {
      --i;
      if (++idx[i] < vals.size()) break;
      idx[i] = 0;
      if (i == 0) return FinSetObj::from_sorted(std::move(es));
    }
  }
}

FinFn eval_fn(const FinSetObj& x, const FinSetObj& y) {
  return FinFn(product(exponential(x, y), x), y,
               [](const Elem& p) { return p.first().apply(p.second()); });
}

FinFn curry_fn(const FinFn& f, const FinSetObj& z, const FinSetObj& x,
               const FinSetObj& y) {
  return FinFn(z, exponential(x, y), [&](const Elem& zv) {
    std::vector<std::pair<Elem, Elem>> ents;
    ents.reserve(x.size());
    for (const Elem& xv : x.elems())
      ents.emplace_back(xv, f(Elem::pair(zv, xv)));
    return Elem::table(std::move(ents));
  });
}

FinFn exp_post(const FinSetObj& x, const FinFn& g) {
  return FinFn(exponential(x, g.dom()), exponential(x, g.cod()),
               [&](const Elem& t) {
                 std::vector<std::pair<Elem, Elem>> ents;
                 ents.reserve(t.entries().size());
                 for (const auto& [k, v] : t.entries())
                   ents.emplace_back(k, g(v));
                 return Elem::table(std::move(ents));
               });
}

// ---- factorisation --------------------------------------------------------

Factorisation factorise(const FinFn& f) {
  FinSetObj img = f.image();
  FinFn e(f.dom(), img, [&](const Elem& x) { return f(x); });
  FinFn m = FinFn::inclusion(img, f.cod());
  return Factorisation{std::move(e), std::move(m), std::move(img), f};
}

FinFn fill_in(const FinFn& e, const FinFn& m, const FinFn& f,
              const FinFn& g) {
  // Square: e : W ->> X, g : X -> Z, f : W -> Y, m : Y >-> Z, m.f == g.e.
  if (!(e.dom() == f.dom()) || !(m.cod() == g.cod()) ||
      !(e.cod() == g.dom()) || !(f.cod() == m.dom()))
    throw SquareDoesNotCommute("fill_in: boundary objects do not line up");
  for (const Elem& w : e.dom().elems())
    if (m(f(w)) != g(e(w)))
      throw SquareDoesNotCommute("fill_in: square does not commute at " +
                                 w.str());
  if (!e.surjective())
    throw SquareDoesNotCommute("fill_in: top edge is not surjective");
  if (!m.injective())
    throw SquareDoesNotCommute("fill_in: bottom edge is not injective");

  // h(x) = f(w) for any w in the e-fibre over x; surjectivity provides a
  // witness and injectivity of m forces consistency, which we re-check.
  std::unordered_map<Elem, Elem, ElemHash> h;
  const auto& ws = e.dom().elems();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    Elem x = e(ws[i]);
    Elem y = f(ws[i]);
    auto [it, fresh] = h.emplace(x, y);
    if (!fresh && it->second != y)
      throw InternalError("fill_in: f is not constant on an e-fibre");
  }
  FinFn diag(e.cod(), m.dom(), [&](const Elem& x) { return h.at(x); });
  for (const Elem& x : e.cod().elems())
    if (m(diag(x)) != g(x)) throw InternalError("fill_in: lower triangle");
  return diag;
}

MonoPullback pullback_mono(const FinFn& m, const FinFn& f) {
  if (!(m.cod() == f.cod())) throw InternalError("pullback: codomain mismatch");
  if (!m.injective()) throw InternalError("pullback: m is not injective");
  std::unordered_map<Elem, Elem, ElemHash> preimage;
  for (const Elem& a : m.dom().elems()) preimage.emplace(m(a), a);
  std::vector<Elem> sub;
  for (const Elem& x : f.dom().elems())
    if (preimage.count(f(x))) sub.push_back(x);
  FinSetObj apex = FinSetObj::from_sorted(std::move(sub));
  FinFn subfn = FinFn::inclusion(apex, f.dom());
  FinFn restr(apex, m.dom(),
              [&](const Elem& x) { return preimage.at(f(x)); });
  return MonoPullback{std::move(subfn), std::move(restr)};
}

}  // namespace effet
