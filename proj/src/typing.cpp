#include "effet/typing.hpp"

#include <sstream>

namespace effet {

Context Context::extended(const Ident& x, const TypeExpr& a) const {
  Context c = *this;
  c.entries_.emplace_back(x, a);
  return c;
}

std::optional<TypeExpr> Context::lookup(const Ident& x) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == x) return it->second;
  return std::nullopt;
}

std::string Context::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ", ";
    os << entries_[i].first << ":" << entries_[i].second.str();
  }
  return os.str();
}

std::string Judgment::str() const {
  std::ostringstream os;
  if (!ctx.empty()) os << ctx.str() << " ";
  os << "|- " << print_term(term) << " : " << type.str();
  if (!eff.is_top()) {
    os << " ! {";
    const auto& ops = eff.ops();
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (i) os << ",";
      os << ops[i];
    }
    os << "}";
  }
  return os.str();
}

namespace {

[[noreturn]] void mismatch(const std::string& msg) { throw TypeMismatch(msg); }

bool has_erased_arrow(const TypeExpr& a) {
  switch (a.kind()) {
    case TypeExpr::Kind::Base:
    case TypeExpr::Kind::Unit:
    case TypeExpr::Kind::Empty:
      return false;
    case TypeExpr::Kind::Prod:
    case TypeExpr::Kind::Sum:
      return has_erased_arrow(a.left()) || has_erased_arrow(a.right());
    case TypeExpr::Kind::Arrow:
      return a.arrow_eff().is_top() || has_erased_arrow(a.left()) ||
             has_erased_arrow(a.right());
  }
  return false;
}

// Inl/Inr/Absurd are not syntax-directed in the declarative rules (the
// missing summand and the absurd result type are free), so they only admit
// checking against an ascribed type.
std::pair<TypeExpr, Effect> check_under_ascription(const Signature& sig,
                                                   const Context& ctx,
                                                   const Term& m,
                                                   const TypeExpr& a,
                                                   const Effect& eps);

std::pair<TypeExpr, Effect> infer_rec(const Signature& sig, const Context& ctx,
                                      const Term& m) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Const: {
      auto it = sig.constants.find(m.name());
      if (it == sig.constants.end())
        throw UnboundVariable("unknown constant or unbound variable '" +
                              m.name() + "'");
      return {it->second, Effect::empty()};
    }
    case K::Var: {
      auto a = ctx.lookup(m.name());
      if (a) return {*a, Effect::empty()};
      if (sig.has_const(m.name()))
        return {sig.constants.at(m.name()), Effect::empty()};
      throw UnboundVariable("unbound variable '" + m.name() + "'");
    }
    case K::Unit:
      return {TypeExpr::unit(), Effect::empty()};
    case K::OpApp: {
      auto it = sig.operations.find(m.name());
      if (it == sig.operations.end())
        throw UnknownOperation("unknown operation '" + m.name() + "'");
      auto [a, e] = infer_rec(sig, ctx, m.child(0));
      if (a != it->second.first)
        mismatch("operation " + m.name() + " expects " +
                 it->second.first.str() + ", got " + a.str());
      return {it->second.second, e.with(m.name())};
    }
    case K::Pair: {
      auto [a, e1] = infer_rec(sig, ctx, m.child(0));
      auto [b, e2] = infer_rec(sig, ctx, m.child(1));
      return {TypeExpr::prod(a, b), e1.union_with(e2)};
    }
    case K::Fst: {
      auto [a, e] = infer_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Prod)
        mismatch("fst expects a product, got " + a.str());
      return {a.left(), e};
    }
    case K::Snd: {
      auto [a, e] = infer_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Prod)
        mismatch("snd expects a product, got " + a.str());
      return {a.right(), e};
    }
    case K::Absurd: {
      auto [a, e] = infer_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Empty)
        mismatch("absurd expects 0, got " + a.str());
      // Principal reading: 0 itself. Other result types need an ascription.
      return {TypeExpr::empty(), e};
    }
    case K::Inl:
    case K::Inr:
      mismatch(
          "sum injections need an ascription to fix the missing summand, "
          "e.g. (inl M : A + B ! {...})");
    case K::Case: {
      auto [s, e0] = infer_rec(sig, ctx, m.child(0));
      if (s.kind() != TypeExpr::Kind::Sum)
        mismatch("case expects a sum, got " + s.str());
      auto [b1, e1] =
          infer_rec(sig, ctx.extended(m.name(), s.left()), m.child(1));
      auto [b2, e2] =
          infer_rec(sig, ctx.extended(m.binder2(), s.right()), m.child(2));
      if (b1 != b2)
        mismatch("case branches disagree: " + b1.str() + " vs " + b2.str());
      return {b1, e0.union_with(e1).union_with(e2)};
    }
    case K::Lam: {
      if (has_erased_arrow(m.type_ann()))
        mismatch("lambda parameter type carries an erased arrow");
      auto [b, e] = infer_rec(sig, ctx.extended(m.name(), m.type_ann()),
                              m.child(0));
      return {TypeExpr::arrow(m.type_ann(), e, b), Effect::empty()};
    }
    case K::App: {
      auto [f, e1] = infer_rec(sig, ctx, m.child(0));
      if (f.kind() != TypeExpr::Kind::Arrow)
        mismatch("application head is not a function: " + f.str());
      auto [a, e2] = infer_rec(sig, ctx, m.child(1));
      if (a != f.left())
        mismatch("argument type " + a.str() + " does not equal the domain " +
                 f.left().str());
      return {f.right(), e1.union_with(e2).union_with(f.arrow_eff())};
    }
    case K::Ascribe:
      return check_under_ascription(sig, ctx, m.child(0), m.type_ann(),
                                    m.eff_ann());
  }
  throw InternalError("infer: unreachable");
}

std::pair<TypeExpr, Effect> check_under_ascription(const Signature& sig,
                                                   const Context& ctx,
                                                   const Term& m,
                                                   const TypeExpr& a,
                                                   const Effect& eps) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Inl: {
      if (a.kind() != TypeExpr::Kind::Sum)
        mismatch("inl ascribed at non-sum type " + a.str());
      check_under_ascription(sig, ctx, m.child(0), a.left(), eps);
      return {a, eps};
    }
    case K::Inr: {
      if (a.kind() != TypeExpr::Kind::Sum)
        mismatch("inr ascribed at non-sum type " + a.str());
      check_under_ascription(sig, ctx, m.child(0), a.right(), eps);
      return {a, eps};
    }
    case K::Absurd: {
      auto [t0, e0] = infer_rec(sig, ctx, m.child(0));
      if (t0.kind() != TypeExpr::Kind::Empty)
        mismatch("absurd expects 0, got " + t0.str());
      if (!e0.subset_of(eps))
        throw EffectExceeded("effect " + e0.str() + " exceeds ascribed " +
                             eps.str());
      return {a, eps};
    }
    default: {
      auto [t0, e0] = infer_rec(sig, ctx, m);
      if (t0 != a)
        mismatch("ascription: inferred " + t0.str() + ", ascribed " + a.str());
      if (!e0.subset_of(eps))
        throw EffectExceeded("effect " + e0.str() + " exceeds ascribed " +
                             eps.str());
      return {a, eps};
    }
  }
}

}  // namespace

std::pair<TypeExpr, Effect> infer(const Signature& sig, const Context& ctx,
                                  const Term& m) {
  return infer_rec(sig, ctx, m);
}

Judgment check(const Signature& sig, const Context& ctx, const Term& m,
               const TypeExpr& a, const Effect& eps) {
  auto [t0, e0] = infer_rec(sig, ctx, m);
  if (t0 != a)
    throw TypeMismatch("checked type " + a.str() + " but inferred " +
                       t0.str());
  if (!e0.subset_of(eps))
    throw EffectExceeded("inferred effect " + e0.str() +
                         " is not contained in " + eps.str());
  return Judgment{ctx, m, a, eps};
}

namespace {

TypeExpr infer_unref_rec(const Signature& sig, const Context& ctx,
                         const Term& m) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Const: {
      auto it = sig.constants.find(m.name());
      if (it == sig.constants.end())
        throw UnboundVariable("unknown constant '" + m.name() + "'");
      return erase_type(it->second);
    }
    case K::Var: {
      auto a = ctx.lookup(m.name());
      if (a) return erase_type(*a);
      if (sig.has_const(m.name()))
        return erase_type(sig.constants.at(m.name()));
      throw UnboundVariable("unbound variable '" + m.name() + "'");
    }
    case K::Unit:
      return TypeExpr::unit();
    case K::OpApp: {
      auto it = sig.operations.find(m.name());
      if (it == sig.operations.end())
        throw UnknownOperation("unknown operation '" + m.name() + "'");
      TypeExpr a = infer_unref_rec(sig, ctx, m.child(0));
      if (a != it->second.first)
        mismatch("operation " + m.name() + " expects " +
                 it->second.first.str());
      return it->second.second;
    }
    case K::Pair:
      return TypeExpr::prod(infer_unref_rec(sig, ctx, m.child(0)),
                            infer_unref_rec(sig, ctx, m.child(1)));
    case K::Fst: {
      TypeExpr a = infer_unref_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Prod) mismatch("fst expects a product");
      return a.left();
    }
    case K::Snd: {
      TypeExpr a = infer_unref_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Prod) mismatch("snd expects a product");
      return a.right();
    }
    case K::Absurd: {
      TypeExpr a = infer_unref_rec(sig, ctx, m.child(0));
      if (a.kind() != TypeExpr::Kind::Empty) mismatch("absurd expects 0");
      return TypeExpr::empty();
    }
    case K::Inl:
    case K::Inr:
      mismatch("sum injections need an ascription");
    case K::Case: {
      TypeExpr s = infer_unref_rec(sig, ctx, m.child(0));
      if (s.kind() != TypeExpr::Kind::Sum) mismatch("case expects a sum");
      TypeExpr b1 =
          infer_unref_rec(sig, ctx.extended(m.name(), s.left()), m.child(1));
      TypeExpr b2 = infer_unref_rec(
          sig, ctx.extended(m.binder2(), s.right()), m.child(2));
      if (b1 != b2) mismatch("case branches disagree");
      return b1;
    }
    case K::Lam: {
      TypeExpr a = erase_type(m.type_ann());
      TypeExpr b = infer_unref_rec(sig, ctx.extended(m.name(), a), m.child(0));
      return TypeExpr::arrow(a, Effect::top(), b);
    }
    case K::App: {
      TypeExpr f = infer_unref_rec(sig, ctx, m.child(0));
      if (f.kind() != TypeExpr::Kind::Arrow)
        mismatch("application head is not a function");
      TypeExpr a = infer_unref_rec(sig, ctx, m.child(1));
      if (a != f.left()) mismatch("argument/domain mismatch");
      return f.right();
    }
    case K::Ascribe: {
      TypeExpr want = erase_type(m.type_ann());
      const Term& inner = m.child(0);
      // the same non-syntax-directed forms as in the refined system
      if (inner.kind() == K::Inl || inner.kind() == K::Inr) {
        if (want.kind() != TypeExpr::Kind::Sum)
          mismatch("injection ascribed at non-sum type");
        Context c2 = ctx;
        TypeExpr branch =
            inner.kind() == K::Inl ? want.left() : want.right();
        TypeExpr got = infer_unref_rec(
            sig, c2, Term::ascribe(inner.child(0), branch, Effect::empty()));
        (void)got;
        return want;
      }
      if (inner.kind() == K::Absurd) {
        TypeExpr t0 = infer_unref_rec(sig, ctx, inner.child(0));
        if (t0.kind() != TypeExpr::Kind::Empty) mismatch("absurd expects 0");
        return want;
      }
      TypeExpr t0 = infer_unref_rec(sig, ctx, inner);
      if (t0 != want)
        mismatch("ascription: inferred " + t0.str() + ", ascribed " +
                 want.str());
      return want;
    }
  }
  throw InternalError("infer_unrefined: unreachable");
}

}  // namespace

TypeExpr infer_unrefined(const Signature& sig, const Context& ctx,
                         const Term& m) {
  return infer_unref_rec(sig, ctx, m);
}

Judgment erase_judgment(const Judgment& j) {
  Context c;
  for (const auto& [x, a] : j.ctx.entries()) c = c.extended(x, erase_type(a));
  return Judgment{c, j.term, erase_type(j.type), Effect::top()};
}

}  // namespace effet
