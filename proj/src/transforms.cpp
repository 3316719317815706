#include "effet/transforms.hpp"

#include <sstream>

namespace effet {

namespace {

bool is_metavar(const Term& t) {
  return t.kind() == Term::Kind::Var && !t.name().empty() &&
         t.name()[0] == '%';
}

bool is_metatype(const TypeExpr& t) {
  return t.kind() == TypeExpr::Kind::Base && !t.base_name().empty() &&
         t.base_name()[0] == '%';
}

/// Structural matching; metavariables are non-linear (repeats must match
/// equal subterms). Patterns with binders match any binder name, and the
/// matched body may not capture the binder (checked by the caller's guard
/// where it matters).
bool match(const Term& pat, const Term& t, RuleBindings& b) {
  if (is_metavar(pat)) {
    auto it = b.find(pat.name());
    if (it != b.end()) return it->second == t;
    b.emplace(pat.name(), t);
    return true;
  }
  if (pat.kind() != t.kind()) return false;
  switch (pat.kind()) {
    case Term::Kind::Const:
    case Term::Kind::Var:
      return pat.name() == t.name();
    case Term::Kind::Unit:
      return true;
    case Term::Kind::OpApp:
      return pat.name() == t.name() && match(pat.child(0), t.child(0), b);
    case Term::Kind::Lam: {
      if (!is_metatype(pat.type_ann()) && pat.type_ann() != t.type_ann())
        return false;
      // normalise the bound name: the pattern's binder stands for the
      // term's binder; bodies compare after renaming via bindings of a
      // marker variable
      if (pat.name() != "%_" && pat.name() != t.name()) return false;
      if (is_metatype(pat.type_ann()))
        b.emplace("%type:" + pat.type_ann().base_name(),
                  Term::lam("_", t.type_ann(), Term::unit_val()));
      b.emplace("%binder", Term::var(t.name()));
      return match(pat.child(0), t.child(0), b);
    }
    case Term::Kind::App:
    case Term::Kind::Pair:
      return match(pat.child(0), t.child(0), b) &&
             match(pat.child(1), t.child(1), b);
    case Term::Kind::Fst:
    case Term::Kind::Snd:
    case Term::Kind::Absurd:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
      return match(pat.child(0), t.child(0), b);
    case Term::Kind::Case:
      return match(pat.child(0), t.child(0), b) &&
             match(pat.child(1), t.child(1), b) &&
             match(pat.child(2), t.child(2), b);
    case Term::Kind::Ascribe:
      return pat.type_ann() == t.type_ann() && pat.eff_ann() == t.eff_ann() &&
             match(pat.child(0), t.child(0), b);
  }
  return false;
}

Term instantiate(const Term& rhs, const RuleBindings& b) {
  if (is_metavar(rhs)) {
    auto it = b.find(rhs.name());
    if (it == b.end())
      throw InternalError("unbound metavariable " + rhs.name());
    return it->second;
  }
  switch (rhs.kind()) {
    case Term::Kind::Const:
    case Term::Kind::Var:
    case Term::Kind::Unit:
      return rhs;
    case Term::Kind::OpApp:
      return Term::op_app(rhs.name(), instantiate(rhs.child(0), b));
    case Term::Kind::Lam: {
      TypeExpr ann = rhs.type_ann();
      if (is_metatype(ann)) {
        auto it = b.find("%type:" + ann.base_name());
        if (it == b.end())
          throw InternalError("unbound type metavariable " + ann.str());
        ann = it->second.type_ann();
      }
      Ident binder = rhs.name();
      auto it = b.find("%name:" + binder);
      if (it != b.end()) binder = it->second.name();
      return Term::lam(binder, ann, instantiate(rhs.child(0), b));
    }
    case Term::Kind::App:
      return Term::app(instantiate(rhs.child(0), b),
                       instantiate(rhs.child(1), b));
    case Term::Kind::Pair:
      return Term::pair(instantiate(rhs.child(0), b),
                        instantiate(rhs.child(1), b));
    case Term::Kind::Fst:
      return Term::fst(instantiate(rhs.child(0), b));
    case Term::Kind::Snd:
      return Term::snd(instantiate(rhs.child(0), b));
    case Term::Kind::Absurd:
      return Term::absurd(instantiate(rhs.child(0), b));
    case Term::Kind::Inl:
      return Term::inl(instantiate(rhs.child(0), b));
    case Term::Kind::Inr:
      return Term::inr(instantiate(rhs.child(0), b));
    case Term::Kind::Case:
      return Term::case_of(instantiate(rhs.child(0), b), rhs.name(),
                           instantiate(rhs.child(1), b), rhs.binder2(),
                           instantiate(rhs.child(2), b));
    case Term::Kind::Ascribe:
      return Term::ascribe(instantiate(rhs.child(0), b), rhs.type_ann(),
                           rhs.eff_ann());
  }
  throw InternalError("instantiate: unreachable");
}

Effect effect_of(const ModelContext& mc, const Context& ctx, const Term& m) {
  return infer(mc.sig(), ctx, m).second;
}

}  // namespace

std::vector<RewriteRule> builtin_rules() {
  std::vector<RewriteRule> rules;

  // CACHE: add (F (), F ())  ~>  let y = F () in add (y, y)
  {
    RewriteRule r;
    r.name = "CACHE";
    r.description =
        "duplicate call of a unit-accepting function becomes a single "
        "let-bound call";
    Term call = Term::app(Term::var("%F"), Term::unit_val());
    r.lhs = Term::app(Term::cnst("add"), Term::pair(call, call));
    r.rhs = Term::app(
        Term::lam("%y0", TypeExpr::base("%B"),
                  Term::app(Term::cnst("add"),
                            Term::pair(Term::var("%y0"), Term::var("%y0")))),
        call);
    r.guard = [](const ModelContext& mc, const Context& ctx,
                 const RuleBindings& b, const Effect&) {
      // the paper's guard: the callee's effect is a proper subset of Sigma
      const Term& f = b.at("%F");
      auto [ft, fe] = infer(mc.sig(), ctx, f);
      (void)fe;
      if (ft.kind() != TypeExpr::Kind::Arrow) return false;
      if (!ft.right().is_ground()) return false;
      Effect latent = ft.arrow_eff();
      Effect full = mc.sig().full_effect();
      return latent.subset_of(full) && latent != full;
    };
    r.derive = [](const ModelContext& mc, const Context& ctx,
                  RuleBindings& b) {
      const Term& f = b.at("%F");
      TypeExpr ft = infer(mc.sig(), ctx, f).first;
      b.emplace("%type:%B",
                Term::lam("_", ft.right(), Term::unit_val()));
      std::set<Ident> avoid = free_vars(f);
      for (const auto& [x, _] : ctx.entries()) avoid.insert(x);
      Ident y = fresh_name("y", avoid);
      b.emplace("%name:%y0", Term::var(y));
      b.emplace("%y0", Term::var(y));
    };
    rules.push_back(std::move(r));
  }

  // DISCARD: let _ = N in M  ~>  M   when N is pure and the binder unused
  {
    RewriteRule r;
    r.name = "DISCARD";
    r.description = "drops a pure let-bound computation whose value is unused";
    r.lhs = Term::app(Term::lam("%_", TypeExpr::base("%A"), Term::var("%M")),
                      Term::var("%N"));
    r.rhs = Term::var("%M");
    r.guard = [](const ModelContext& mc, const Context& ctx,
                 const RuleBindings& b, const Effect&) {
      // binder must not occur in the body
      const Term& body = b.at("%M");
      const Term& binder = b.at("%binder");
      if (free_vars(body).count(binder.name())) return false;
      return effect_of(mc, ctx, b.at("%N")).empty_set();
    };
    r.derive = [](const ModelContext&, const Context&, RuleBindings&) {};
    rules.push_back(std::move(r));
  }

  // REORDER: (M, N)  ~>  right-first sequencing of the same pair
  {
    RewriteRule r;
    r.name = "REORDER";
    r.description =
        "evaluates the pair components right-first; sound when the combined "
        "effect is commutative";
    r.lhs = Term::pair(Term::var("%M"), Term::var("%N"));
    r.rhs = Term::app(
        Term::lam("%y1", TypeExpr::base("%B"),
                  Term::app(Term::lam("%y0", TypeExpr::base("%A"),
                                      Term::pair(Term::var("%y0"),
                                                 Term::var("%y1"))),
                            Term::var("%M"))),
        Term::var("%N"));
    r.guard = [](const ModelContext& mc, const Context& ctx,
                 const RuleBindings& b, const Effect&) {
      auto [ta, ea] = infer(mc.sig(), ctx, b.at("%M"));
      auto [tb, eb] = infer(mc.sig(), ctx, b.at("%N"));
      Effect eps = ea.union_with(eb);
      FinSetObj xo = interp_type(mc, ta, Mode::Refined);
      FinSetObj yo = interp_type(mc, tb, Mode::Refined);
      return mc.family().check_commutative(eps, xo, yo, nullptr);
    };
    r.derive = [](const ModelContext& mc, const Context& ctx,
                  RuleBindings& b) {
      TypeExpr ta = infer(mc.sig(), ctx, b.at("%M")).first;
      TypeExpr tb = infer(mc.sig(), ctx, b.at("%N")).first;
      b.emplace("%type:%A", Term::lam("_", ta, Term::unit_val()));
      b.emplace("%type:%B", Term::lam("_", tb, Term::unit_val()));
      std::set<Ident> avoid = free_vars(b.at("%M"));
      for (const Ident& v : free_vars(b.at("%N"))) avoid.insert(v);
      for (const auto& [x, _] : ctx.entries()) avoid.insert(x);
      Ident y0 = fresh_name("xl", avoid);
      avoid.insert(y0);
      Ident y1 = fresh_name("xr", avoid);
      b.emplace("%name:%y0", Term::var(y0));
      b.emplace("%name:%y1", Term::var(y1));
      b.emplace("%y0", Term::var(y0));
      b.emplace("%y1", Term::var(y1));
    };
    rules.push_back(std::move(r));
  }

  return rules;
}

namespace {

void collect_sites(const ModelContext& mc, const RewriteRule& rule,
                   const Term& root, const Term& cur, const Context& ctx,
                   const std::string& path,
                   const std::function<Term(const Term&)>& rebuild,
                   std::vector<RewriteSite>& out) {
  RuleBindings b;
  if (match(rule.lhs, cur, b)) {
    bool guard_ok = false;
    try {
      Effect redex_eff = effect_of(mc, ctx, cur);
      guard_ok = rule.guard(mc, ctx, b, redex_eff);
    } catch (const TypeError&) {
      guard_ok = false;
    }
    if (guard_ok) {
      RuleBindings b2 = b;
      rule.derive(mc, ctx, b2);
      Term replacement = instantiate(rule.rhs, b2);
      out.push_back(RewriteSite{path.empty() ? "root" : path, cur,
                                replacement, rebuild(replacement)});
    }
  }
  // descend, tracking binders
  auto child_ctx = [&](std::size_t i) {
    if (cur.kind() == Term::Kind::Lam && i == 0)
      return ctx.extended(cur.name(), cur.type_ann());
    if (cur.kind() == Term::Kind::Case && i == 1) {
      TypeExpr s = infer(mc.sig(), ctx, cur.child(0)).first;
      return ctx.extended(cur.name(), s.left());
    }
    if (cur.kind() == Term::Kind::Case && i == 2) {
      TypeExpr s = infer(mc.sig(), ctx, cur.child(0)).first;
      return ctx.extended(cur.binder2(), s.right());
    }
    return ctx;
  };
  for (std::size_t i = 0; i < cur.child_count(); ++i) {
    std::string p = path.empty() ? std::to_string(i)
                                 : path + "." + std::to_string(i);
    auto rebuild_i = [&, i](const Term& nw) {
      Term replaced;
      switch (cur.kind()) {
        case Term::Kind::OpApp:
          replaced = Term::op_app(cur.name(), nw);
          break;
        case Term::Kind::Pair:
          replaced = i == 0 ? Term::pair(nw, cur.child(1))
                            : Term::pair(cur.child(0), nw);
          break;
        case Term::Kind::Fst:
          replaced = Term::fst(nw);
          break;
        case Term::Kind::Snd:
          replaced = Term::snd(nw);
          break;
        case Term::Kind::Absurd:
          replaced = Term::absurd(nw);
          break;
        case Term::Kind::Inl:
          replaced = Term::inl(nw);
          break;
        case Term::Kind::Inr:
          replaced = Term::inr(nw);
          break;
        case Term::Kind::Case:
          replaced = i == 0 ? Term::case_of(nw, cur.name(), cur.child(1),
                                            cur.binder2(), cur.child(2))
                            : (i == 1 ? Term::case_of(cur.child(0), cur.name(),
                                                      nw, cur.binder2(),
                                                      cur.child(2))
                                      : Term::case_of(cur.child(0), cur.name(),
                                                      cur.child(1),
                                                      cur.binder2(), nw));
          break;
        case Term::Kind::Lam:
          replaced = Term::lam(cur.name(), cur.type_ann(), nw);
          break;
        case Term::Kind::App:
          replaced = i == 0 ? Term::app(nw, cur.child(1))
                            : Term::app(cur.child(0), nw);
          break;
        case Term::Kind::Ascribe:
          replaced = Term::ascribe(nw, cur.type_ann(), cur.eff_ann());
          break;
        default:
          throw InternalError("rebuild: no children");
      }
      return rebuild(replaced);
    };
    try {
      collect_sites(mc, rule, root, cur.child(i), child_ctx(i), p, rebuild_i,
                    out);
    } catch (const TypeError&) {
      // ill-typed contexts under this node cannot host guarded redexes
    }
  }
}

}  // namespace

std::vector<RewriteSite> apply_rule(const ModelContext& mc,
                                    const RewriteRule& rule, const Term& m) {
  std::vector<RewriteSite> out;
  collect_sites(mc, rule, m, m, Context{}, "",
                [](const Term& t) { return t; }, out);
  return out;
}

ValidationReport validate_instance(const ModelContext& mc, const Term& before,
                                   const Term& after,
                                   const std::string& rule_name) {
  ValidationReport rep;
  rep.rule = rule_name;
  rep.before = before;
  rep.after = after;
  EquivResult r = equiv(mc, before, after, Mode::Refined);
  rep.refined_valid = r.equal;
  rep.witness = r.witness;
  rep.ground = r.jm.type.is_ground();
  if (rep.ground) {
    EquivResult u = equiv(mc, before, after, Mode::Unrefined);
    rep.unrefined_equal = u.equal;
    rep.transfer_ok = (u.equal == r.equal);
  }
  return rep;
}

}  // namespace effet
