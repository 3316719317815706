#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effet/termgen.hpp"
#include "effet/transforms.hpp"

using namespace effet;

namespace {

const ModelContext& z2() {
  static ModelContext m(ModelConfig::standard("state", {"l1"}, 2));
  return m;
}

Term P(const std::string& s) { return parse_term(s, z2().sig()); }

const RewriteRule& rule(const std::string& name) {
  static std::vector<RewriteRule> rules = builtin_rules();
  for (const auto& r : rules)
    if (r.name == name) return r;
  throw std::runtime_error("no rule " + name);
}

// the four callee variants of the introduction's program, one per effect
std::string callee(const std::string& eps) {
  if (eps == "pure") return "\\(_:unit). 1";
  if (eps == "get") return "\\(_:unit). get l1";
  if (eps == "set") return "\\(_:unit). let _ = set (l1, 1) in 0";
  // the incrementing variant: reads and writes the same location
  return "\\(_:unit). let _ = set (l1, add (1, get l1)) in get l1";
}

Term cache_before(const std::string& eps) {
  return P("let f = " + callee(eps) + " in add (f (), f ())");
}

}  // namespace

TEST_CASE("DISCARD: drops pure unused lets") {
  Term m = P("let u = () in 1");
  auto sites = apply_rule(z2(), rule("DISCARD"), m);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].rewritten == P("1"));

  // effectful bound terms are not discarded by the guard
  Term eff = P("let u = set (l1, 1) in 0");
  CHECK(apply_rule(z2(), rule("DISCARD"), eff).empty());

  // a used binder is not discarded
  Term used = P("let u = 1 in add (u, u)");
  CHECK(apply_rule(z2(), rule("DISCARD"), used).empty());

  // no sites in a bare variable
  CHECK(apply_rule(z2(), rule("DISCARD"), Term::var("x")).empty());
}

TEST_CASE("CACHE: rewrites the duplicated call under the guard") {
  Term m = cache_before("get");
  auto sites = apply_rule(z2(), rule("CACHE"), m);
  REQUIRE(sites.size() == 1);
  // the rewritten term is the let-cached form
  Term expect =
      P("let f = " + callee("get") + " in let y = f () in add (y, y)");
  CHECK(sites[0].rewritten == expect);

  // at the full effect the guard refuses (validation would catch it too)
  CHECK(apply_rule(z2(), rule("CACHE"), cache_before("inc")).empty());
}

TEST_CASE("REORDER: guarded by commutativity of the combined effect") {
  // get/get commutes
  Term gets = P("(get l1, get l1)");
  auto sites = apply_rule(z2(), rule("REORDER"), gets);
  REQUIRE(sites.size() == 1);
  // a write against a read does not commute: the top-level pair is not a
  // site (the pure argument pair of set still is)
  Term mix = P("(get l1, set (l1, 1))");
  for (const auto& site : apply_rule(z2(), rule("REORDER"), mix))
    CHECK(site.path != "root");
}

TEST_CASE("rewrites preserve the type and do not grow the effect") {
  TermGen gen(z2(), 1212);
  auto rules = builtin_rules();
  int rewrites = 0;
  for (int i = 0; i < 200 && rewrites < 40; ++i) {
    Term m = gen.ground_term(gen.ground_type(1), gen.effect_budget(), 3);
    auto [ty, ef] = infer(z2().sig(), Context{}, m);
    for (const auto& r : rules) {
      for (const auto& site : apply_rule(z2(), r, m)) {
        auto [ty2, ef2] = infer(z2().sig(), Context{}, site.rewritten);
        CHECK(ty2 == ty);
        CHECK(ef2.subset_of(ef));
        ++rewrites;
      }
    }
  }
  CHECK(rewrites >= 10);
}

TEST_CASE("validate_instance: the introduction's caching matrix") {
  // valid for every proper subset of {get,set}
  for (const char* eps : {"pure", "get", "set"}) {
    Term before = cache_before(eps);
    auto sites = apply_rule(z2(), rule("CACHE"), before);
    REQUIRE(sites.size() == 1);
    ValidationReport rep =
        validate_instance(z2(), before, sites[0].rewritten, "CACHE");
    CAPTURE(eps);
    CHECK(rep.refined_valid);
    CHECK(rep.ground);
    CHECK(rep.unrefined_equal.value());
    CHECK(rep.transfer_ok);
  }
  // invalid at the full effect, with a state witness
  Term before = cache_before("inc");
  Term after =
      P("let f = " + callee("inc") + " in let y = f () in add (y, y)");
  ValidationReport rep = validate_instance(z2(), before, after, "CACHE");
  CHECK(!rep.refined_valid);
  CHECK(!rep.witness.empty());
  CHECK(rep.witness.find("l1") != std::string::npos);
  CHECK(rep.transfer_ok);  // unrefined disagrees too: biconditional holds
  CHECK(!rep.unrefined_equal.value());
}

TEST_CASE("validate_instance: REORDER validity matches commutativity") {
  Term gets = P("(get l1, get l1)");
  auto s1 = apply_rule(z2(), rule("REORDER"), gets);
  REQUIRE(s1.size() == 1);
  CHECK(validate_instance(z2(), gets, s1[0].rewritten, "REORDER")
            .refined_valid);

  // force the invalid reordering by hand (the guard would refuse)
  Term mix = P("(get l1, set (l1, 1))");
  Term swapped = P(
      "let xr = set (l1, 1) in let xl = get l1 in (xl, xr)");
  ValidationReport rep = validate_instance(z2(), mix, swapped, "REORDER");
  CHECK(!rep.refined_valid);
  CHECK(!rep.witness.empty());
}

TEST_CASE("validate_instance: DISCARD for pure bound terms") {
  Term m = P("let u = get l1 in 1");
  // not guarded ({get} != {}), but semantically valid in this model:
  // validation is the arbiter either way
  ValidationReport rep = validate_instance(z2(), m, P("1"), "DISCARD");
  CHECK(rep.refined_valid);
  Term eff = P("let u = set (l1, 1) in 0");
  ValidationReport rep2 = validate_instance(z2(), eff, P("0"), "DISCARD");
  CHECK(!rep2.refined_valid);
}

TEST_CASE("guard soundness on a generated corpus") {
  TermGen gen(z2(), 777);
  auto rules = builtin_rules();
  int validated = 0;
  for (int i = 0; i < 300 && validated < 60; ++i) {
    Term m = gen.ground_term(gen.ground_type(0), gen.effect_budget(), 3);
    for (const auto& r : rules) {
      for (const auto& site : apply_rule(z2(), r, m)) {
        ValidationReport rep =
            validate_instance(z2(), m, site.rewritten, r.name);
        CAPTURE(r.name);
        CAPTURE(print_term(m));
        CHECK(rep.refined_valid);
        CHECK(rep.transfer_ok);
        ++validated;
      }
    }
  }
  CHECK(validated >= 20);
}
