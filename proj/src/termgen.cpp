#include "effet/termgen.hpp"

#include <algorithm>

namespace effet {

TermGen::TermGen(const ModelContext& mc, std::uint64_t seed)
    : mc_(mc), rng_(seed) {}

std::size_t TermGen::pick(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool TermGen::coin(double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

Ident TermGen::some_loc() {
  const auto& locs = mc_.cfg().loc_names;
  return locs[pick(locs.size())];
}

Ident TermGen::some_numeral() {
  return std::to_string(pick(static_cast<std::size_t>(mc_.cfg().int_mod)));
}

TypeExpr TermGen::ground_type(int depth) {
  TypeExpr tint = TypeExpr::base("int");
  if (depth <= 0 || coin(0.5)) {
    switch (pick(3)) {
      case 0: return tint;
      case 1: return TypeExpr::unit();
      default: return TypeExpr::base("Loc");
    }
  }
  if (coin(0.5))
    return TypeExpr::prod(ground_type(depth - 1), ground_type(depth - 1));
  return TypeExpr::sum(ground_type(depth - 1), ground_type(depth - 1));
}

Effect TermGen::effect_budget() {
  std::vector<Ident> ops;
  for (const auto& [op, _] : mc_.sig().operations)
    if (coin(0.5)) ops.push_back(op);
  return Effect::of(std::move(ops));
}

Term TermGen::ground_term(const TypeExpr& type, const Effect& budget,
                          int depth) {
  bool has_get = budget.contains("get") && mc_.sig().has_op("get");
  bool has_set = budget.contains("set") && mc_.sig().has_op("set");
  auto int_term = [&](int d) {
    return ground_term(TypeExpr::base("int"), budget, d);
  };

  // structural leaves
  if (depth <= 0) {
    switch (type.kind()) {
      case TypeExpr::Kind::Base:
        if (type.base_name() == "int") return Term::cnst(some_numeral());
        return Term::cnst(some_loc());
      case TypeExpr::Kind::Unit:
        return Term::unit_val();
      case TypeExpr::Kind::Prod:
        return Term::pair(ground_term(type.left(), budget, 0),
                          ground_term(type.right(), budget, 0));
      case TypeExpr::Kind::Sum: {
        bool left = coin(0.5);
        Term inner = ground_term(left ? type.left() : type.right(), budget, 0);
        return Term::ascribe(left ? Term::inl(inner) : Term::inr(inner), type,
                             budget);
      }
      default:
        throw InternalError("generator: unsupported ground type");
    }
  }

  // effectful / structural alternatives
  switch (type.kind()) {
    case TypeExpr::Kind::Base: {
      if (type.base_name() == "Loc") {
        if (coin(0.2)) {
          // fst/snd projection from a pair
          TypeExpr other = ground_type(1);
          if (coin(0.5))
            return Term::fst(ground_term(TypeExpr::prod(type, other), budget,
                                         depth - 1));
          return Term::snd(
              ground_term(TypeExpr::prod(other, type), budget, depth - 1));
        }
        return Term::cnst(some_loc());
      }
      // int-typed terms
      switch (pick(has_get ? 6 : 5)) {
        case 0:
          return Term::cnst(some_numeral());
        case 1:
          return Term::app(Term::cnst("add"),
                           Term::pair(int_term(depth - 1),
                                      int_term(depth - 1)));
        case 2:
          return Term::app(Term::cnst("mul"),
                           Term::pair(int_term(depth - 1),
                                      int_term(depth - 1)));
        case 3: {
          // let x = M in x + ...: a beta-redex
          Term bound = int_term(depth - 1);
          return Term::app(Term::lam("v", TypeExpr::base("int"),
                                     Term::app(Term::cnst("add"),
                                               Term::pair(Term::var("v"),
                                                          int_term(depth - 1)))),
                           bound);
        }
        case 4: {
          // case over a generated sum
          TypeExpr ts = TypeExpr::sum(TypeExpr::base("int"), TypeExpr::unit());
          Term scrut = ground_term(ts, budget, depth - 1);
          return Term::case_of(scrut, "a", Term::var("a"), "b",
                               int_term(depth - 1));
        }
        default:
          return Term::op_app("get", Term::cnst(some_loc()));
      }
    }
    case TypeExpr::Kind::Unit: {
      if (has_set && coin(0.5))
        return Term::op_app(
            "set", Term::pair(Term::cnst(some_loc()), int_term(depth - 1)));
      if (coin(0.3)) {
        // sequencing sugar: let _ = M in ()
        TypeExpr ta = ground_type(1);
        Term bound = ground_term(ta, budget, depth - 1);
        return Term::app(Term::lam("u", ta, Term::unit_val()), bound);
      }
      return Term::unit_val();
    }
    case TypeExpr::Kind::Prod:
      return Term::pair(ground_term(type.left(), budget, depth - 1),
                        ground_term(type.right(), budget, depth - 1));
    case TypeExpr::Kind::Sum: {
      bool left = coin(0.5);
      Term inner =
          ground_term(left ? type.left() : type.right(), budget, depth - 1);
      return Term::ascribe(left ? Term::inl(inner) : Term::inr(inner), type,
                           budget);
    }
    default:
      throw InternalError("generator: unsupported ground type");
  }
}

std::vector<std::pair<Term, Term>> TermGen::completeness_pairs(std::size_t n) {
  std::vector<std::pair<Term, Term>> out;
  out.reserve(n);
  while (out.size() < n) {
    TypeExpr g = ground_type(coin(0.7) ? 0 : 1);
    Effect budget = effect_budget();
    Term m = ground_term(g, budget, 2 + static_cast<int>(pick(2)));
    if (coin(0.2)) {
      // identical pair
      out.emplace_back(m, m);
      continue;
    }
    if (coin(0.45)) {
      // equal by construction: wrap in a pure let that re-derives the term
      // from a discarded pure value
      Term pure_val = ground_term(ground_type(0), Effect::empty(), 1);
      TypeExpr pt = infer(mc_.sig(), Context{}, pure_val).first;
      Term wrapped =
          Term::app(Term::lam("dead", pt, m), pure_val);
      out.emplace_back(m, wrapped);
      continue;
    }
    // independent same-type pair (may or may not be equal)
    Term other = ground_term(g, budget, 2 + static_cast<int>(pick(2)));
    out.emplace_back(m, other);
  }
  return out;
}

Term TermGen::arbitrary_term(int depth) {
  // closed by construction: binders introduced before variables are used
  std::vector<std::pair<Ident, TypeExpr>> scope;
  std::function<Term(int)> go = [&](int d) -> Term {
    if (d <= 0) {
      switch (pick(scope.empty() ? 3 : 4)) {
        case 0: return Term::unit_val();
        case 1: return Term::cnst(some_numeral());
        case 2: return Term::cnst(some_loc());
        default: return Term::var(scope[pick(scope.size())].first);
      }
    }
    switch (pick(10)) {
      case 0: {
        Ident x = "v" + std::to_string(scope.size());
        TypeExpr a = ground_type(1);
        scope.emplace_back(x, a);
        Term body = go(d - 1);
        scope.pop_back();
        return Term::lam(x, a, body);
      }
      case 1: return Term::app(go(d - 1), go(d - 1));
      case 2: return Term::pair(go(d - 1), go(d - 1));
      case 3: return Term::fst(go(d - 1));
      case 4: return Term::snd(go(d - 1));
      case 5: {
        Ident x = "v" + std::to_string(scope.size());
        scope.emplace_back(x, TypeExpr::unit());
        Term n1 = go(d - 1);
        scope.pop_back();
        Ident y = "w" + std::to_string(scope.size());
        scope.emplace_back(y, TypeExpr::unit());
        Term n2 = go(d - 1);
        scope.pop_back();
        return Term::case_of(go(d - 1), x, n1, y, n2);
      }
      case 6:
        if (mc_.sig().has_op("get"))
          return Term::op_app("get", go(d - 1));
        return go(d - 1);
      case 7:
        return Term::ascribe(go(d - 1), ground_type(1), effect_budget());
      case 8:
        return Term::inl(go(d - 1));
      default:
        return Term::app(Term::cnst("add"),
                         Term::pair(go(d - 1), go(d - 1)));
    }
  };
  return go(depth);
}

}  // namespace effet
