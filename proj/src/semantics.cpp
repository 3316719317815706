#include "effet/semantics.hpp"

#include <sstream>

namespace effet {

Elem Denotation::value() const {
  if (values.size() != 1)
    throw InternalError("value() on a non-closed denotation");
  return values[0];
}

// ---- type interpretation ----------------------------------------------------

static FinSetObj interp_type_uncached(const ModelContext& mc,
                                      const TypeExpr& a, Mode mode);

FinSetObj interp_type(const ModelContext& mc, const TypeExpr& a, Mode mode) {
  std::string key =
      (mode == Mode::Refined ? "r:" : "u:") + print_type(a);
  if (auto hit = mc.type_memo_get(key)) return *hit;
  FinSetObj o = interp_type_uncached(mc, a, mode);
  mc.type_memo_put(key, o);
  return o;
}

static FinSetObj interp_type_uncached(const ModelContext& mc,
                                      const TypeExpr& a, Mode mode) {
  switch (a.kind()) {
    case TypeExpr::Kind::Base: {
      auto it = mc.cfg().base_interp.find(a.base_name());
      if (it == mc.cfg().base_interp.end())
        throw ConfigError("base type '" + a.base_name() +
                          "' has no interpretation");
      return it->second;
    }
    case TypeExpr::Kind::Unit:
      return terminal_obj();
    case TypeExpr::Kind::Empty:
      return initial_obj();
    case TypeExpr::Kind::Prod:
      return product(interp_type(mc, a.left(), mode),
                     interp_type(mc, a.right(), mode));
    case TypeExpr::Kind::Sum:
      return coproduct(interp_type(mc, a.left(), mode),
                       interp_type(mc, a.right(), mode));
    case TypeExpr::Kind::Arrow: {
      FinSetObj dom = interp_type(mc, a.left(), mode);
      FinSetObj codv = interp_type(mc, a.right(), mode);
      if (mode == Mode::Refined) {
        if (a.arrow_eff().is_top())
          throw TypeMismatch("erased arrow has no refined denotation: " +
                             a.str());
        const GradedCarrier& c = mc.family().carrier(a.arrow_eff(), codv);
        return exponential(dom, c.subset());
      }
      return exponential(dom, mc.model().carrier(codv));
    }
  }
  throw InternalError("interp_type: unreachable");
}

FinSetObj interp_context(const ModelContext& mc, const Context& ctx,
                         Mode mode) {
  FinSetObj g = terminal_obj();
  for (const auto& [x, a] : ctx.entries()) {
    TypeExpr t = mode == Mode::Unrefined ? erase_type(a) : a;
    g = product(g, interp_type(mc, t, mode));
  }
  return g;
}

// ---- the evaluator ------------------------------------------------------------

namespace {

struct Env {
  std::vector<std::pair<Ident, Elem>> slots;
  std::optional<Elem> get(const Ident& x) const {
    for (auto it = slots.rbegin(); it != slots.rend(); ++it)
      if (it->first == x) return it->second;
    return std::nullopt;
  }
};

/// Evaluates terms to elements of T|A|, with all types and effects coming
/// from the inference rules so that the denotation matches the principal
/// judgment exactly (including at empty types, where evaluation alone
/// could not observe a branch). Standard Moggi clauses; sequencing is
/// left-to-right via bind and strength, and the refined/unrefined
/// difference is entirely in which type denotations are used — the
/// inclusion coercions are subset inclusions, hence invisible on elements.
struct Evaluator {
  const ModelContext& mc;
  Mode mode;
  const MonadModel& t;

  Evaluator(const ModelContext& m, Mode md) : mc(m), mode(md), t(m.model()) {}

  TypeExpr typed(const Context& ctx, const Term& m) const {
    if (mode == Mode::Unrefined) return infer_unrefined(mc.sig(), ctx, m);
    return infer(mc.sig(), ctx, m).first;
  }

  FinSetObj obj(const TypeExpr& a) const { return interp_type(mc, a, mode); }

  /// Object handed to the monad's elementwise operations. Models with
  /// structural elements never consult it, which lets sequencing happen at
  /// arrow types whose denotations are too large to materialise.
  FinSetObj mobj(const TypeExpr& a) const {
    if (t.elementwise_needs_objects()) return obj(a);
    return FinSetObj();
  }

  Elem eval(const Context& ctx, const Env& env, const Term& m) const {
    using K = Term::Kind;
    switch (m.kind()) {
      case K::Var: {
        if (auto v = env.get(m.name())) {
          TypeExpr a = typed(ctx, m);
          return t.unit(mobj(a), *v);
        }
        return eval_const(m.name());
      }
      case K::Const:
        return eval_const(m.name());
      case K::Unit:
        return t.unit(terminal_obj(), Elem::star());
      case K::OpApp: {
        const auto& gg = mc.sig().operations.at(m.name());
        Elem arg = eval(ctx, env, m.child(0));
        return t.bind(mobj(gg.first), mobj(gg.second), arg,
                      [&](const Elem& a) {
                        return t.generic_at(m.name(), a);
                      });
      }
      case K::Pair: {
        TypeExpr ta = typed(ctx, m.child(0));
        TypeExpr tb = typed(ctx, m.child(1));
        FinSetObj lo = mobj(ta), ro = mobj(tb);
        FinSetObj po = t.elementwise_needs_objects()
                           ? product(lo, ro)
                           : FinSetObj();
        Elem l = eval(ctx, env, m.child(0));
        Elem r = eval(ctx, env, m.child(1));
        return t.bind(lo, po, l, [&](const Elem& lv) {
          return t.strength(lo, ro, lv, r);
        });
      }
      case K::Fst: {
        TypeExpr tp = typed(ctx, m.child(0));
        Elem p = eval(ctx, env, m.child(0));
        return t.fmap(mobj(tp), mobj(tp.left()), p,
                      [](const Elem& pr) { return pr.first(); });
      }
      case K::Snd: {
        TypeExpr tp = typed(ctx, m.child(0));
        Elem p = eval(ctx, env, m.child(0));
        return t.fmap(mobj(tp), mobj(tp.right()), p,
                      [](const Elem& pr) { return pr.second(); });
      }
      case K::Inl:
      case K::Inr:
        throw TypeMismatch("sum injections need an ascription");
      case K::Absurd: {
        Elem z = eval(ctx, env, m.child(0));
        return t.bind(initial_obj(), initial_obj(), z,
                      [](const Elem&) -> Elem {
                        throw InternalError(
                            "a value of the empty type was produced");
                      });
      }
      case K::Case: {
        TypeExpr ts = typed(ctx, m.child(0));
        TypeExpr ta = ts.left(), tb = ts.right();
        Context c1 = ctx.extended(m.name(), ta);
        Context c2 = ctx.extended(m.binder2(), tb);
        TypeExpr bt = typed(c1, m.child(1));
        FinSetObj so = mobj(ts), bo = mobj(bt);
        // pre-tabulate the branches over the summand denotations
        std::vector<std::pair<Elem, Elem>> lefts, rights;
        FinSetObj tao = obj(ta), tbo = obj(tb);
        for (const Elem& v : tao.elems()) {
          Env e2 = env;
          e2.slots.emplace_back(m.name(), v);
          lefts.emplace_back(v, eval(c1, e2, m.child(1)));
        }
        for (const Elem& v : tbo.elems()) {
          Env e2 = env;
          e2.slots.emplace_back(m.binder2(), v);
          rights.emplace_back(v, eval(c2, e2, m.child(2)));
        }
        Elem s = eval(ctx, env, m.child(0));
        return t.bind(so, bo, s, [&](const Elem& sv) {
          const auto& side =
              sv.kind() == Elem::Kind::InjL ? lefts : rights;
          for (const auto& [w, o] : side)
            if (w == sv.inj_value()) return o;
          throw InternalError("case scrutinee outside its denotation");
        });
      }
      case K::Lam: {
        TypeExpr arrow = typed(ctx, m);
        TypeExpr pa = arrow.left();
        Context c2 = ctx.extended(m.name(), m.type_ann());
        std::vector<std::pair<Elem, Elem>> table;
        FinSetObj pao = obj(pa);
        for (const Elem& v : pao.elems()) {
          Env e2 = env;
          e2.slots.emplace_back(m.name(), v);
          table.emplace_back(v, eval(c2, e2, m.child(0)));
        }
        return t.unit(mobj(arrow), Elem::table(std::move(table)));
      }
      case K::App: {
        TypeExpr tf = typed(ctx, m.child(0));
        FinSetObj ao = mobj(tf.left());
        FinSetObj bo = mobj(tf.right());
        // beta-redexes (in particular desugared lets) evaluate the bound
        // computation and enter the body directly; by the left unit law
        // this equals tabulating the lambda first, and it avoids
        // materialising function spaces that are only applied once
        if (m.child(0).kind() == K::Lam) {
          const Term& lam = m.child(0);
          Context c2 = ctx.extended(lam.name(), lam.type_ann());
          Elem a = eval(ctx, env, m.child(1));
          return t.bind(ao, bo, a, [&](const Elem& av) {
            Env e2 = env;
            e2.slots.emplace_back(lam.name(), av);
            return eval(c2, e2, lam.child(0));
          });
        }
        FinSetObj fo = mobj(tf);
        Elem f = eval(ctx, env, m.child(0));
        Elem a = eval(ctx, env, m.child(1));
        return t.bind(fo, bo, f, [&](const Elem& fv) {
          return t.bind(ao, bo, a,
                        [&](const Elem& av) { return fv.apply(av); });
        });
      }
      case K::Ascribe: {
        TypeExpr want =
            mode == Mode::Unrefined ? erase_type(m.type_ann()) : m.type_ann();
        return eval_at(ctx, env, m.child(0), want);
      }
    }
    throw InternalError("eval: unreachable");
  }

  /// Checking-mode evaluation for the non-syntax-directed constructs.
  Elem eval_at(const Context& ctx, const Env& env, const Term& m,
               const TypeExpr& want) const {
    using K = Term::Kind;
    if (m.kind() == K::Inl || m.kind() == K::Inr) {
      bool left = m.kind() == K::Inl;
      TypeExpr branch = left ? want.left() : want.right();
      Elem o = eval_at(ctx, env, m.child(0), branch);
      return t.fmap(mobj(branch), mobj(want), o, [&](const Elem& bv) {
        return left ? Elem::inl(bv) : Elem::inr(bv);
      });
    }
    if (m.kind() == K::Absurd) {
      Elem z = eval(ctx, env, m.child(0));
      return t.bind(initial_obj(), mobj(want), z, [](const Elem&) -> Elem {
        throw InternalError("a value of the empty type was produced");
      });
    }
    return eval(ctx, env, m);
  }

  Elem eval_const(const Ident& c) const {
    auto it = mc.cfg().constants.find(c);
    if (it == mc.cfg().constants.end())
      throw UnboundVariable("unknown constant or unbound variable '" + c +
                            "'");
    Elem v = mode == Mode::Refined ? interp_constant_refined(mc, c)
                                   : interp_constant_unrefined(mc, c);
    TypeExpr a = mode == Mode::Unrefined ? erase_type(it->second.type)
                                         : it->second.type;
    return t.unit(mobj(a), v);
  }
};

std::vector<Env> all_envs(const ModelContext& mc, const Context& ctx,
                          Mode mode) {
  std::vector<Env> envs{Env{}};
  for (const auto& [x, a] : ctx.entries()) {
    TypeExpr t = mode == Mode::Unrefined ? erase_type(a) : a;
    FinSetObj o = interp_type(mc, t, mode);
    std::vector<Env> next;
    next.reserve(envs.size() * std::max<std::size_t>(1, o.size()));
    for (const Env& e : envs)
      for (const Elem& v : o.elems()) {
        Env e2 = e;
        e2.slots.emplace_back(x, v);
        next.push_back(std::move(e2));
      }
    envs = std::move(next);
  }
  return envs;
}

}  // namespace

// ---- constants ---------------------------------------------------------------

Elem interp_constant_unrefined(const ModelContext& mc, const Ident& c) {
  auto it = mc.cfg().constants.find(c);
  if (it == mc.cfg().constants.end())
    throw ConfigError("constant '" + c + "' is not declared");
  const ConstantDef& def = it->second;
  const TypeExpr& a = def.type;
  if (a.is_ground()) {
    if (!def.ground_value.valid())
      throw ConfigError("constant '" + c + "' lacks a value");
    return def.ground_value;
  }
  if (a.kind() == TypeExpr::Kind::Arrow) {
    if (def.raw_arrow_value) return *def.raw_arrow_value;
    if (!a.left().is_ground() || !a.right().is_ground() ||
        !a.arrow_eff().empty_set())
      throw ConfigError(
          "constant '" + c +
          "' must be ground or a first-order pure arrow (G1 -{}-> G2)");
    FinSetObj dom = interp_type(mc, a.left(), Mode::Unrefined);
    FinSetObj cod = interp_type(mc, a.right(), Mode::Unrefined);
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& x : dom.elems()) {
      auto v = def.pure_table.find(x);
      if (v == def.pure_table.end())
        throw ConfigError("constant '" + c + "' table is not total");
      ents.emplace_back(x, mc.model().unit(cod, v->second));
    }
    return Elem::table(std::move(ents));
  }
  throw ConfigError("constant '" + c +
                    "' must be ground or a first-order pure arrow");
}

Elem interp_constant_refined(const ModelContext& mc, const Ident& c) {
  Elem unref = interp_constant_unrefined(mc, c);
  const ConstantDef& def = mc.cfg().constants.at(c);
  const TypeExpr& a = def.type;
  if (a.is_ground()) return unref;  // ground denotations coincide
  // first-order arrow: every output must lie in the graded carrier of the
  // annotation; with canonical subsets, "the mono-embedding recovers the
  // unrefined element" is exactly membership of each output
  FinSetObj cod = interp_type(mc, a.right(), Mode::Refined);
  const GradedCarrier& carrier = mc.family().carrier(a.arrow_eff(), cod);
  for (const auto& [x, v] : unref.entries()) {
    if (!carrier.contains(v))
      throw IncompatibleConstant(
          "constant '" + c + "' is not compatible with the refined model: " +
          "output at " + x.str() + " lies outside T_" + a.arrow_eff().str());
  }
  return unref;
}

// ---- entry points --------------------------------------------------------------

Denotation interp_refined(const ModelContext& mc, const Context& ctx,
                          const Term& m) {
  auto [ty, ef] = infer(mc.sig(), ctx, m);
  Evaluator ev(mc, Mode::Refined);
  FinSetObj dom = interp_context(mc, ctx, Mode::Refined);
  std::vector<Env> envs = all_envs(mc, ctx, Mode::Refined);
  std::vector<Elem> values;
  values.reserve(envs.size());
  for (const Env& e : envs) values.push_back(ev.eval(ctx, e, m));
  // the values of a refined interpretation lie in the graded carrier of
  // the principal effect (spot-checked when the type denotation is small
  // enough to saturate; a failure is an engine bug)
  try {
    const GradedCarrier& c =
        mc.family().carrier(ef, interp_type(mc, ty, Mode::Refined));
    for (const Elem& v : values)
      if (!c.contains(v))
        throw InternalError(
            "refined denotation escaped its graded carrier (engine bug)");
  } catch (const SizeLimitExceeded&) {
  } catch (const SaturationLimitExceeded&) {
  }
  return Denotation{Judgment{ctx, m, ty, ef}, Mode::Refined, dom,
                    std::move(values)};
}

Denotation interp_refined_at(const ModelContext& mc, const Judgment& j) {
  Denotation d = interp_refined(mc, j.ctx, j.term);
  if (d.j.type != j.type)
    throw TypeMismatch("judgment type is not the principal type");
  if (!d.j.eff.subset_of(j.eff))
    throw EffectExceeded("judgment effect below the principal effect");
  // coercion along the inclusion is the identity on elements
  const GradedCarrier& c =
      mc.family().carrier(j.eff, interp_type(mc, j.type, Mode::Refined));
  for (const Elem& v : d.values)
    if (!c.contains(v))
      throw InternalError("coercion misses the wider carrier (engine bug)");
  d.j = j;
  return d;
}

Denotation interp_unrefined(const ModelContext& mc, const Context& ctx,
                            const Term& m) {
  TypeExpr ty = infer_unrefined(mc.sig(), ctx, m);
  Evaluator ev(mc, Mode::Unrefined);
  FinSetObj dom = interp_context(mc, ctx, Mode::Unrefined);
  std::vector<Env> envs = all_envs(mc, ctx, Mode::Unrefined);
  std::vector<Elem> values;
  values.reserve(envs.size());
  for (const Env& e : envs) values.push_back(ev.eval(ctx, e, m));
  return Denotation{Judgment{ctx, m, ty, Effect::top()}, Mode::Unrefined,
                    dom, std::move(values)};
}

// ---- equivalence ---------------------------------------------------------------

std::string diff_witness(const Elem& a, const Elem& b) {
  if (a == b) return "";
  if (a.kind() == Elem::Kind::Table && b.kind() == Elem::Kind::Table &&
      a.entries().size() == b.entries().size()) {
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
      const auto& [ka, va] = a.entries()[i];
      const auto& [kb, vb] = b.entries()[i];
      if (ka == kb && va != vb)
        return "at input " + ka.str() + ": " + diff_witness(va, vb);
    }
  }
  if (a.kind() == Elem::Kind::Pair && b.kind() == Elem::Kind::Pair) {
    if (a.first() != b.first())
      return "first component: " + diff_witness(a.first(), b.first());
    return "second component: " + diff_witness(a.second(), b.second());
  }
  return a.str() + " vs " + b.str();
}

EquivResult equiv(const ModelContext& mc, const Term& m, const Term& n,
                  Mode mode) {
  Context empty;
  if (!free_vars(m).empty() || !free_vars(n).empty())
    throw TypeMismatch("equiv requires closed terms");
  Denotation dm = mode == Mode::Refined ? interp_refined(mc, empty, m)
                                        : interp_unrefined(mc, empty, m);
  Denotation dn = mode == Mode::Refined ? interp_refined(mc, empty, n)
                                        : interp_unrefined(mc, empty, n);
  if (dm.j.type != dn.j.type)
    throw TypeMismatch("equiv requires both terms at one type: " +
                       dm.j.type.str() + " vs " + dn.j.type.str());
  if (mode == Mode::Refined) {
    // compare at the union effect; the coercions are subset inclusions so
    // the elements themselves are comparable directly
    Effect common = dm.j.eff.union_with(dn.j.eff);
    dm.j.eff = common;
    dn.j.eff = common;
  }
  Elem a = dm.value(), b = dn.value();
  if (a == b) return {true, dm.j, dn.j, ""};
  return {false, dm.j, dn.j, diff_witness(a, b)};
}

}  // namespace effet
