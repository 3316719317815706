#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "effet/lifting.hpp"
#include "effet/termgen.hpp"

using namespace effet;

namespace {

FinSetObj atoms(std::initializer_list<const char*> names) {
  std::vector<Elem> es;
  for (const char* n : names) es.push_back(Elem::atom(n));
  return FinSetObj::from_elems(std::move(es));
}

const ModelContext& state_ctx() {
  static ModelContext m(ModelConfig::standard("state", {"l1"}, 2));
  return m;
}
const ModelContext& cont_ctx() {
  static ModelContext m(ModelConfig::standard("cont_state", {"l1"}, 2, 2));
  return m;
}

Effect E(std::initializer_list<const char*> ops) {
  std::vector<Ident> v;
  for (const char* o : ops) v.emplace_back(o);
  return Effect::of(std::move(v));
}

}  // namespace

TEST_CASE("diagonal relations") {
  FinSetObj one = terminal_obj();
  Rel d1 = Rel::diagonal(one);
  CHECK(d1.pairs.size() == 1);
  CHECK(d1.contains(Elem::star(), Elem::star()));

  FinSetObj x = atoms({"a", "b", "c"});
  Rel dx = Rel::diagonal(x);
  CHECK(dx.pairs.size() == x.size());
  for (const Elem& a : x.elems())
    for (const Elem& b : x.elems())
      CHECK(dx.contains(a, b) == (a == b));
}

TEST_CASE("free_lift: empty effect keeps only unit pairs") {
  FinSetObj x = atoms({"a", "b"});
  Rel r = Rel::diagonal(x);
  LiftedCarrier lift = free_lift(state_ctx().family(), Effect::empty(), r);
  CHECK(lift.pairs.size() == 2);
  const MonadModel& t = state_ctx().model();
  for (const Elem& v : x.elems())
    CHECK(lift.contains(t.unit(x, v), t.unit(x, v)));
}

TEST_CASE("free_lift at {set} is the graph of the mono") {
  FinSetObj x = atoms({"a", "b"});
  LiftedCarrier lift =
      free_lift(state_ctx().family(), E({"set"}), Rel::diagonal(x));
  CHECK(lift.pairs.size() == 6);
  const GradedCarrier& c = state_ctx().family().carrier(E({"set"}), x);
  // every pair is (behaviour, its embedding); monos here are inclusions
  for (const auto& [a, b] : lift.pairs) {
    CHECK(a == b);
    CHECK(c.contains(a));
  }
}

TEST_CASE("free_lift: monotone in the relation") {
  FinSetObj x = atoms({"a", "b"});
  Rel small = Rel::from_pairs(x, x, {{Elem::atom("a"), Elem::atom("a")}});
  Rel big = Rel::diagonal(x);
  for (const Effect& eps : {E({"set"}), E({"get"}), E({"get", "set"})}) {
    LiftedCarrier ls = free_lift(state_ctx().family(), eps, small);
    LiftedCarrier lb = free_lift(state_ctx().family(), eps, big);
    for (const auto& [a, b] : ls.pairs) CHECK(lb.contains(a, b));
    CHECK(ls.pairs.size() <= lb.pairs.size());
  }
}

TEST_CASE("free_lift: closure conditions hold post hoc") {
  FinSetObj x = atoms({"a", "b"});
  for (const Effect& eps :
       {Effect::empty(), E({"get"}), E({"set"}), E({"get", "set"})}) {
    LiftedCarrier lift =
        free_lift(state_ctx().family(), eps, Rel::diagonal(x));
    std::string why;
    CHECK_MESSAGE(check_lift_closure(state_ctx().family(), eps,
                                     Rel::diagonal(x), lift.pairs, &why),
                  why);
  }
}

TEST_CASE("initiality at desk scale: exhaustive over small candidate sets") {
  // wherever |T_eps X x T X| <= 12, enumerate all subsets, keep those
  // satisfying the two closure conditions, and check the free lifting is
  // contained in each
  struct Case {
    const ModelContext* mc;
    Effect eps;
    FinSetObj x;
  };
  std::vector<Case> cases = {
      {&state_ctx(), Effect::empty(), terminal_obj()},
      {&state_ctx(), E({"get"}), terminal_obj()},
      {&state_ctx(), E({"set"}), terminal_obj()},
  };
  for (const auto& [mcp, eps, x] : cases) {
    const GradedFamily& fam = mcp->family();
    const MonadModel& t = fam.model();
    const GradedCarrier& c = fam.carrier(eps, x);
    FinSetObj tx = t.carrier(x);
    std::vector<std::pair<Elem, Elem>> universe;
    for (const Elem& a : c.subset().elems())
      for (const Elem& b : tx.elems()) universe.emplace_back(a, b);
    REQUIRE(universe.size() <= 12);
    Rel diag = Rel::diagonal(x);
    LiftedCarrier lift = free_lift(fam, eps, diag);
    std::size_t candidates = 0;
    for (std::size_t mask = 0; mask < (1u << universe.size()); ++mask) {
      std::vector<std::pair<Elem, Elem>> q;
      for (std::size_t i = 0; i < universe.size(); ++i)
        if (mask & (1u << i)) q.push_back(universe[i]);
      std::sort(q.begin(), q.end(), [](const auto& p1, const auto& p2) {
        int c0 = Elem::cmp(p1.first, p2.first);
        if (c0 != 0) return c0 < 0;
        return Elem::cmp(p1.second, p2.second) < 0;
      });
      if (!check_lift_closure(fam, eps, diag, q, nullptr)) continue;
      ++candidates;
      // the free lifting is below every closed candidate
      for (const auto& p : lift.pairs)
        CHECK(std::binary_search(
            q.begin(), q.end(), p, [](const auto& p1, const auto& p2) {
              int c0 = Elem::cmp(p1.first, p2.first);
              if (c0 != 0) return c0 < 0;
              return Elem::cmp(p1.second, p2.second) < 0;
            }));
    }
    CHECK(candidates >= 1);  // the full product always qualifies
  }
}

TEST_CASE("initiality, sampled: saturated supersets contain the lifting") {
  std::mt19937_64 rng(5);
  FinSetObj x = atoms({"a", "b"});
  const GradedFamily& fam = state_ctx().family();
  const MonadModel& t = fam.model();
  FinSetObj tx = t.carrier(x);
  for (const Effect& eps : {E({"get"}), E({"get", "set"})}) {
    LiftedCarrier lift = free_lift(fam, eps, Rel::diagonal(x));
    for (int round = 0; round < 10; ++round) {
      // seed a relation above the diagonal and saturate it
      std::vector<std::pair<Elem, Elem>> seed;
      for (const Elem& a : x.elems()) seed.emplace_back(a, a);
      std::uniform_int_distribution<std::size_t> d(0, x.size() - 1);
      seed.emplace_back(x.elems()[d(rng)], x.elems()[d(rng)]);
      Rel r = Rel::from_pairs(x, x, std::move(seed));
      LiftedCarrier big = free_lift(fam, eps, r);
      std::string why;
      CHECK(check_lift_closure(fam, eps, r, big.pairs, &why));
      for (const auto& [a, b] : lift.pairs) CHECK(big.contains(a, b));
    }
  }
}

TEST_CASE("mono lemma: state and cont_state, all effects, sizes 1..2") {
  for (const ModelContext* mcp : {&state_ctx(), &cont_ctx()}) {
    for (const Effect& eps :
         {Effect::empty(), E({"get"}), E({"set"}), E({"get", "set"})}) {
      for (std::size_t n : {1u, 2u}) {
        MonoLemmaReport rep =
            verify_mono_lemma(mcp->family(), eps, generic_object(n));
        CAPTURE(eps.str());
        CAPTURE(n);
        CHECK_MESSAGE(rep.pass, rep.detail);
        // pair counts follow the closed forms on the diagonal
        const GradedCarrier& c =
            mcp->family().carrier(eps, generic_object(n));
        CHECK(rep.pairs_checked == c.subset().size());
      }
    }
  }
}

TEST_CASE("completeness: handwritten pairs") {
  const ModelContext& mc = state_ctx();
  auto P = [&](const std::string& s) { return parse_term(s, mc.sig()); };
  std::vector<std::pair<Term, Term>> corpus = {
      // the caching pair at {set}: equal on both sides
      {P("let f = \\(_:unit). let _ = set (l1, 1) in 0 in add (f (), f ())"),
       P("let f = \\(_:unit). let _ = set (l1, 1) in 0 in "
         "let y = f () in add (y, y)")},
      // the incrementing variant at {get,set}: unequal on both sides
      {P("let f = \\(_:unit). let _ = set (l1, add (1, get l1)) in get l1 in "
         "add (f (), f ())"),
       P("let f = \\(_:unit). let _ = set (l1, add (1, get l1)) in get l1 in "
         "let y = f () in add (y, y)")},
      // identical terms
      {P("get l1"), P("get l1")},
  };
  CompletenessReport rep = verify_completeness(mc, corpus);
  CHECK(rep.all_ok);
  CHECK(rep.cases[0].refined_equal);
  CHECK(rep.cases[0].unrefined_equal);
  CHECK(!rep.cases[1].refined_equal);
  CHECK(!rep.cases[1].unrefined_equal);
  CHECK(rep.cases[2].refined_equal);
  CHECK(rep.equal_count == 2);
  CHECK(rep.unequal_count == 1);
}

TEST_CASE("completeness: generated corpus biconditional") {
  const ModelContext& mc = state_ctx();
  TermGen gen(mc, 4242);
  auto corpus = gen.completeness_pairs(60);
  CompletenessReport rep = verify_completeness(mc, corpus);
  CHECK(rep.all_ok);
  CHECK(rep.cases.size() == 60);
  CHECK(rep.equal_count > 0);
  CHECK(rep.unequal_count > 0);
}

TEST_CASE("relation validation") {
  FinSetObj x = atoms({"a"});
  FinSetObj y = atoms({"b"});
  CHECK_THROWS_AS(
      Rel::from_pairs(x, y, {{Elem::atom("zz"), Elem::atom("b")}}),
      InternalError);
}
