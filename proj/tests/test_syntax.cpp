#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effet/config.hpp"
#include "effet/syntax.hpp"
#include "effet/termgen.hpp"

using namespace effet;

namespace {

const ModelContext& mc() {
  static ModelContext m(ModelConfig::standard("state", {"loc1", "l1"}, 8));
  return m;
}

const Signature& sig() { return mc().sig(); }

Term P(const std::string& s) { return parse_term(s, sig()); }
TypeExpr T(const std::string& s) { return parse_type(s, sig()); }

}  // namespace

TEST_CASE("parse: operation application") {
  Term m = P("set (loc1, 3)");
  CHECK(m == Term::op_app("set", Term::pair(Term::cnst("loc1"),
                                            Term::cnst("3"))));
}

TEST_CASE("parse: annotated lambda") {
  Term m = P("\\(x:int). x");
  CHECK(m == Term::lam("x", TypeExpr::base("int"), Term::var("x")));
}

TEST_CASE("parse: case over an injection") {
  Term m = P("case inl () of {inl x -> x | inr y -> y}");
  CHECK(m == Term::case_of(Term::inl(Term::unit_val()), "x", Term::var("x"),
                           "y", Term::var("y")));
}

TEST_CASE("parse: let desugars to an annotated beta-redex") {
  Term m = P("let x = 3 in x");
  CHECK(m == Term::app(Term::lam("x", TypeExpr::base("int"), Term::var("x")),
                       Term::cnst("3")));
  // the bound term's effect does not leak into the annotation
  Term g = P("let x = get loc1 in x");
  CHECK(g.child(0).type_ann() == TypeExpr::base("int"));
}

TEST_CASE("parse: ascription and effect sets") {
  Term m = P("(3 : int ! {get})");
  CHECK(m.kind() == Term::Kind::Ascribe);
  CHECK(m.eff_ann() == Effect::of({"get"}));
  CHECK(m.type_ann() == TypeExpr::base("int"));
  CHECK(P("(() : unit ! {})").eff_ann() == Effect::empty());
}

TEST_CASE("parse: types") {
  CHECK(T("unit") == TypeExpr::unit());
  CHECK(T("0") == TypeExpr::empty());
  CHECK(T("int * Loc") ==
        TypeExpr::prod(TypeExpr::base("int"), TypeExpr::base("Loc")));
  CHECK(T("int + unit") ==
        TypeExpr::sum(TypeExpr::base("int"), TypeExpr::unit()));
  CHECK(T("unit -{get}-> int") ==
        TypeExpr::arrow(TypeExpr::unit(), Effect::of({"get"}),
                        TypeExpr::base("int")));
  CHECK(T("unit -> int") ==
        TypeExpr::arrow(TypeExpr::unit(), Effect::top(),
                        TypeExpr::base("int")));
  CHECK(T("unit -{get,set}-> int").arrow_eff() == Effect::of({"set", "get"}));
  // arrows associate right, products bind tighter than sums
  TypeExpr nested = T("int * int + unit -{}-> int -{get}-> unit");
  CHECK(nested.kind() == TypeExpr::Kind::Arrow);
  CHECK(nested.left().kind() == TypeExpr::Kind::Sum);
  CHECK(nested.right().kind() == TypeExpr::Kind::Arrow);
}

TEST_CASE("print: spec forms") {
  CHECK(print_term(Term::var("x")) == "x");
  CHECK(print_term(Term::app(
            Term::lam("x", TypeExpr::base("int"), Term::var("x")),
            Term::cnst("3"))) == "(\\(x:int). x) 3");
  CHECK(print_term(Term::op_app("get", Term::cnst("loc1"))) == "get loc1");
}

TEST_CASE("comments and whitespace") {
  Term m = P("-- a comment\n  get loc1 -- trailing\n");
  CHECK(m == Term::op_app("get", Term::cnst("loc1")));
}

TEST_CASE("parse errors carry positions") {
  try {
    P("fst ,");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.col >= 4);
  }
  CHECK_THROWS_AS(P("(x : int ! {nosuch})"), UnknownName);
  CHECK_THROWS_AS(T("badbase"), UnknownName);
  CHECK_THROWS_AS(P("get"), SyntaxError);  // operation with no argument
  CHECK_THROWS_AS(P("let = 3 in x"), SyntaxError);
}

TEST_CASE("erase_type: sentinel annotation, idempotence, ground preservation") {
  TypeExpr a = T("unit -{set}-> int");
  TypeExpr e = erase_type(a);
  CHECK(e.arrow_eff().is_top());
  CHECK(erase_type(e) == e);
  CHECK(erase_type(T("int")) == T("int"));
  TypeExpr p = TypeExpr::prod(a, TypeExpr::unit());
  TypeExpr pe = erase_type(p);
  CHECK(pe.left().arrow_eff().is_top());
  CHECK(pe.right() == TypeExpr::unit());
  // ground types are fixed points and stay ground
  for (const char* g : {"int", "unit", "0", "int * Loc", "int + unit"}) {
    CHECK(erase_type(T(g)) == T(g));
    CHECK(T(g).is_ground());
    CHECK(erase_type(T(g)).is_ground());
  }
  CHECK(!a.is_ground());
  CHECK(!erase_type(a).is_ground());
}

TEST_CASE("roundtrip: parse . print = id on generated terms") {
  TermGen gen(mc(), 2024);
  for (int i = 0; i < 300; ++i) {
    Term m = gen.arbitrary_term(1 + i % 4);
    std::string s = print_term(m);
    CAPTURE(s);
    Term back = parse_term(s, sig());
    CHECK(back == m);
  }
}

TEST_CASE("roundtrip: well-typed generated terms") {
  TermGen gen(mc(), 99);
  for (int i = 0; i < 200; ++i) {
    TypeExpr g = gen.ground_type(1);
    Term m = gen.ground_term(g, gen.effect_budget(), 3);
    Term back = parse_term(print_term(m), sig());
    CHECK(back == m);
  }
}

TEST_CASE("free variables and substitution") {
  Term m = P("\\(x:int). add (x, y)");
  auto fv = free_vars(m);
  CHECK(fv.count("y") == 1);
  CHECK(fv.count("x") == 0);

  // substitution under a binder is capture-avoiding
  Term body = P("\\(x:int). add (x, y)");
  Term n = Term::var("x");  // free x must not be captured
  Term r = subst(body, "y", n);
  CHECK(r.kind() == Term::Kind::Lam);
  CHECK(r.name() != "x");
  CHECK(free_vars(r).count("x") == 1);

  CHECK(subst(P("add (z, z)"), "z", P("3")) == P("add (3, 3)"));
}

TEST_CASE("signature validation") {
  Signature bad;
  bad.base_types = {"int"};
  bad.operations.emplace(
      "op1", std::make_pair(TypeExpr::base("nosuch"), TypeExpr::unit()));
  CHECK_THROWS_AS(bad.validate(), UnknownName);

  Signature nonground;
  nonground.base_types = {"int"};
  nonground.operations.emplace(
      "op1",
      std::make_pair(TypeExpr::arrow(TypeExpr::unit(), Effect::empty(),
                                     TypeExpr::base("int")),
                     TypeExpr::unit()));
  CHECK_THROWS_AS(nonground.validate(), ConfigError);
}
