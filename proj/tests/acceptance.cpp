// Acceptance suite: one check per shipped claim, one verdict line each.
// Run via ctest or directly; exits nonzero if any criterion fails.

#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "effet/lifting.hpp"
#include "effet/semantics.hpp"
#include "effet/termgen.hpp"
#include "effet/transforms.hpp"

using namespace effet;

namespace {

int g_failures = 0;

void verdict(int number, const std::string& name, bool pass,
             const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << number
            << ": " << name;
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

Effect E(std::initializer_list<const char*> ops) {
  std::vector<Ident> v;
  for (const char* o : ops) v.emplace_back(o);
  return Effect::of(std::move(v));
}

std::vector<Effect> subsets_of_sigma() {
  return {Effect::empty(), E({"get"}), E({"set"}), E({"get", "set"})};
}

ModelContext& state_z2() {
  static ModelContext m(ModelConfig::standard("state", {"l1"}, 2));
  return m;
}

ModelContext& cont_z2() {
  static ModelContext m(ModelConfig::standard("cont_state", {"l1"}, 2, 2));
  return m;
}

// ---- criterion 1: full state factorisation + writer isomorphism ----------

Elem overwrite_apply(const Elem& w, const Elem& s) {
  std::vector<std::pair<Elem, Elem>> ents;
  for (const auto& [l, cell] : s.entries()) {
    Elem wl = w.apply(l);
    ents.emplace_back(l, wl.kind() == Elem::Kind::InjR ? wl.inj_value()
                                                       : cell);
  }
  return Elem::table(std::move(ents));
}

void criterion1() {
  const GradedFamily& fam = state_z2().family();
  const MonadModel& st = state_z2().model();
  std::ostringstream detail;
  bool ok = true;

  for (std::size_t n : {1u, 2u, 3u}) {
    FinSetObj x = generic_object(n);
    ok = ok && fam.carrier(Effect::empty(), x).subset().size() == n;
    ok = ok && fam.carrier(E({"get"}), x).subset().size() == n * n;
    ok = ok && fam.carrier(E({"set"}), x).subset().size() == 3 * n;
    ok = ok &&
         fam.carrier(E({"get", "set"}), x).subset().size() == 4 * n * n;
  }
  detail << "carriers |X|, |X|^2, 3|X|, (2|X|)^2 at |X|=1,2,3";

  // T_set is the writer monad over the overwriting monoid: exhibit the
  // bijection and match unit, bind and the set generic across it
  Monoid mo = overwriting_monoid(state_z2().cfg().locs_obj(),
                                 state_z2().cfg().values_obj());
  auto wt = writer_monad(mo);
  wt->install_state_ops(state_z2().cfg().locs_obj(),
                        state_z2().cfg().values_obj());
  FinSetObj states = state_z2().cfg().state_obj();
  auto phi = [&](const Elem& w) {
    std::vector<std::pair<Elem, Elem>> ents;
    for (const Elem& s : states.elems())
      ents.emplace_back(s,
                        Elem::pair(overwrite_apply(w.first(), s), w.second()));
    return Elem::table(std::move(ents));
  };
  unsigned long long bind_pairs = 0;
  for (std::size_t n : {1u, 2u, 3u}) {
    FinSetObj x = generic_object(n);
    FinSetObj wx = wt->carrier(x);
    const GradedCarrier& cx = fam.carrier(E({"set"}), x);
    std::set<Elem> image;
    for (const Elem& w : wx.elems()) {
      Elem e = phi(w);
      ok = ok && cx.contains(e);
      image.insert(e);
    }
    ok = ok && image.size() == cx.subset().size();
    for (const Elem& v : x.elems())
      ok = ok && phi(wt->unit(x, v)) == st.unit(x, v);
    FinSetObj konts = exponential(x, wx);
    for (const Elem& w : wx.elems())
      for (const Elem& k : konts.elems()) {
        ++bind_pairs;
        Elem lhs = phi(wt->bind(x, x, w,
                                [&](const Elem& v) { return k.apply(v); }));
        Elem rhs = st.bind(x, x, phi(w),
                           [&](const Elem& v) { return phi(k.apply(v)); });
        ok = ok && lhs == rhs;
      }
  }
  const GenericEffect& gs = st.generic("set");
  for (const Elem& a : gs.arg.elems())
    ok = ok && phi(wt->generic_at("set", a)) == st.generic_at("set", a);
  detail << "; writer iso bind tables matched (" << bind_pairs << " pairs)";
  verdict(1, "full state factorisation", ok, detail.str());
}

// ---- criterion 2: overwriting monoid laws ---------------------------------

void criterion2() {
  bool ok = true;
  std::ostringstream detail;
  unsigned long long checked = 0;
  for (int nloc : {1, 2})
    for (int k : {2, 3}) {
      std::vector<Elem> ls, vs;
      for (int i = 0; i < nloc; ++i)
        ls.push_back(Elem::atom("l" + std::to_string(i + 1)));
      for (int i = 0; i < k; ++i)
        vs.push_back(Elem::atom(std::to_string(i)));
      Monoid m = overwriting_monoid(FinSetObj::from_elems(ls),
                                    FinSetObj::from_elems(vs));
      try {
        m.check_laws();
      } catch (const MonoidLawViolation&) {
        ok = false;
      }
      for (const Elem& a : m.carrier.elems()) {
        ok = ok && m.times(a, a) == a;
        ++checked;
      }
      checked += m.carrier.size() * m.carrier.size() * m.carrier.size();
    }
  detail << checked << " law instances over |Loc|<=2, k<=3";
  verdict(2, "overwriting monoid laws", ok, detail.str());
}

// ---- criterion 3: oracle equivalence ---------------------------------------

void criterion3() {
  bool ok = true;
  std::ostringstream detail;
  int max_depth = 0;
  for (const Effect& eps : subsets_of_sigma())
    for (std::size_t n : {1u, 2u}) {
      FinSetObj x = generic_object(n);
      const MonadModel& t = state_z2().model();
      std::set<Elem> prev;
      std::set<Elem> img;
      for (int d = 0;; ++d) {
        std::set<Elem> cur;
        for (const FreeTerm& ft : enumerate_free_terms(t, eps, x, d))
          cur.insert(interpret_free_term(t, x, ft));
        if (d > 0 && cur == prev) {
          img = cur;
          max_depth = std::max(max_depth, d);
          break;
        }
        prev = std::move(cur);
      }
      const GradedCarrier& c = state_z2().family().carrier(eps, x);
      std::set<Elem> sub(c.subset().elems().begin(),
                         c.subset().elems().end());
      ok = ok && img == sub;
    }
  detail << "images stabilise by depth " << max_depth
         << " and equal the fixpoint carriers";
  verdict(3, "free-term oracle equivalence", ok, detail.str());
}

// ---- criterion 4: continuation-monad factorisation -------------------------

void criterion4() {
  const GradedFamily& sf = state_z2().family();
  const GradedFamily& cf = cont_z2().family();
  const MonadModel& st = state_z2().model();
  const MonadModel& ct = cont_z2().model();
  FinSetObj states = state_z2().cfg().state_obj();
  bool ok = true;
  std::ostringstream detail;

  // phi embeds a state behaviour into the continuation model
  FinSetObj answers =
      FinSetObj::from_elems({Elem::atom("r0"), Elem::atom("r1")});
  auto phi = [&](const FinSetObj& x, const Elem& t) {
    FinSetObj ks = exponential(product(x, states), answers);
    std::vector<std::pair<Elem, Elem>> outer;
    for (const Elem& k : ks.elems()) {
      std::vector<std::pair<Elem, Elem>> inner;
      for (const Elem& s : states.elems()) {
        Elem p = t.apply(s);  // (s', v)
        inner.emplace_back(s, k.apply(Elem::pair(p.second(), p.first())));
      }
      outer.emplace_back(k, Elem::table(std::move(inner)));
    }
    return Elem::table(std::move(outer));
  };

  unsigned long long matched = 0;
  for (const Effect& eps : subsets_of_sigma()) {
    for (std::size_t n : {1u, 2u}) {
      FinSetObj x = generic_object(n);
      const GradedCarrier& sc = sf.carrier(eps, x);
      const GradedCarrier& cc = cf.carrier(eps, x);
      ok = ok && sc.subset().size() == cc.subset().size();
      // the bijection carries the state carrier onto the cont carrier
      std::set<Elem> image;
      for (const Elem& t : sc.subset().elems()) {
        Elem e = phi(x, t);
        ok = ok && cc.contains(e);
        image.insert(e);
      }
      ok = ok && image.size() == cc.subset().size();
      // units correspond
      for (const Elem& v : x.elems())
        ok = ok && phi(x, st.unit(x, v)) == ct.unit(x, v);
    }
    // graded binds are isomorphic: phi(bind_s(t,k)) = bind_c(phi t, phi.k)
    for (std::size_t n : {1u, 2u})
      for (std::size_t m : {1u, 2u}) {
        FinSetObj x = generic_object(n);
        FinSetObj y(FinSetObj::from_elems([&] {
          std::vector<Elem> es;
          for (std::size_t i = 0; i < m; ++i)
            es.push_back(Elem::atom("y" + std::to_string(i)));
          return es;
        }()));
        const GradedCarrier& sx = sf.carrier(eps, x);
        const GradedCarrier& sy = sf.carrier(eps, y);
        FinSetObj konts = exponential(x, sy.subset());
        for (const Elem& t : sx.subset().elems())
          for (const Elem& k : konts.elems()) {
            ++matched;
            Elem lhs = phi(y, st.bind(x, y, t, [&](const Elem& v) {
                             return k.apply(v);
                           }));
            Elem rhs = ct.bind(x, y, phi(x, t), [&](const Elem& v) {
              return phi(y, k.apply(v));
            });
            ok = ok && lhs == rhs;
          }
      }
    // generic effects correspond
    if (!eps.empty_set())
      for (const Ident& op : eps.ops()) {
        const GenericEffect& g = st.generic(op);
        for (const Elem& a : g.arg.elems())
          ok = ok &&
               phi(g.res, st.generic_at(op, a)) == ct.generic_at(op, a);
      }
  }
  detail << "cardinalities match and " << matched
         << " graded bind instances transport along the bijection";
  verdict(4, "continuation-monad factorisation", ok, detail.str());
}

// ---- criterion 5: monad and strength law suites -----------------------------

void criterion5() {
  bool ok = true;
  unsigned long long checked = 0;
  std::size_t skipped = 0;
  std::vector<FinSetObj> objs{generic_object(1), generic_object(2),
                              generic_object(3)};

  std::vector<std::pair<std::string, std::shared_ptr<MonadModel>>> models;
  models.emplace_back("identity", identity_monad());
  {
    ModelConfig c2 = state_z2().cfg();
    auto st = state_monad(c2.state_obj());
    st->install_state_ops(c2.locs_obj(), c2.values_obj());
    models.emplace_back("state", st);
    auto rd = reader_monad(c2.state_obj());
    rd->install_state_ops(c2.locs_obj(), c2.values_obj());
    models.emplace_back("reader", rd);
    auto wr = writer_monad(overwriting_monoid(c2.locs_obj(), c2.values_obj()));
    wr->install_state_ops(c2.locs_obj(), c2.values_obj());
    models.emplace_back("writer", wr);
    std::vector<Elem> rs{Elem::atom("r0"), Elem::atom("r1")};
    auto cn = cont_state_monad(FinSetObj::from_elems(rs), c2.state_obj());
    cn->install_state_ops(c2.locs_obj(), c2.values_obj());
    models.emplace_back("cont_state", cn);
  }

  for (const auto& [name, model] : models) {
    LawReport rep = check_monad_laws(*model, objs);
    ok = ok && rep.all_pass();
    checked += rep.total_checked();
    for (const auto& r : rep.results)
      if (r.status == LawStatus::Skipped) ++skipped;
  }

  // graded carriers of both workbench configs
  for (ModelContext* mc : {&state_z2(), &cont_z2()}) {
    std::size_t top = mc->cfg().monad_name == "state" ? 3 : 2;
    for (const Effect& eps : subsets_of_sigma())
      for (std::size_t n = 1; n <= top; ++n) {
        LawReport rep = check_graded_laws(mc->family(), eps,
                                          generic_object(n),
                                          generic_object(n));
        ok = ok && rep.all_pass();
        checked += rep.total_checked();
        for (const auto& r : rep.results)
          if (r.status == LawStatus::Skipped) ++skipped;
      }
  }

  std::ostringstream detail;
  detail << checked << " law instances checked, " << skipped
         << " skipped as unrepresentable (continuation carriers)";
  verdict(5, "monad/strength law suites and bind coincidence", ok,
          detail.str());
}

// ---- criterion 6: the mono lemma --------------------------------------------

void criterion6() {
  bool ok = true;
  std::size_t pairs = 0;
  for (ModelContext* mc : {&state_z2(), &cont_z2()})
    for (const Effect& eps : subsets_of_sigma())
      for (std::size_t n : {1u, 2u}) {
        MonoLemmaReport rep =
            verify_mono_lemma(mc->family(), eps, generic_object(n));
        ok = ok && rep.pass;
        pairs += rep.pairs_checked;
      }
  std::ostringstream detail;
  detail << pairs
         << " lifted pairs checked over state and cont_state, all effects, "
            "|X|<=2";
  verdict(6, "mono lemma", ok, detail.str());
}

// ---- criterion 7: completeness ----------------------------------------------

void criterion7() {
  const ModelContext& mc = state_z2();
  auto P = [&](const std::string& s) { return parse_term(s, mc.sig()); };
  std::vector<std::pair<Term, Term>> corpus = {
      {P("let f = \\(_:unit). let _ = set (l1, 1) in 0 in add (f (), f ())"),
       P("let f = \\(_:unit). let _ = set (l1, 1) in 0 in "
         "let y = f () in add (y, y)")},
      {P("let f = \\(_:unit). get l1 in add (f (), f ())"),
       P("let f = \\(_:unit). get l1 in let y = f () in add (y, y)")},
      {P("let f = \\(_:unit). let _ = set (l1, add (1, get l1)) in get l1 in "
         "add (f (), f ())"),
       P("let f = \\(_:unit). let _ = set (l1, add (1, get l1)) in get l1 in "
         "let y = f () in add (y, y)")},
      {P("let triple = \\(_:unit). mul (1, get l1) in "
         "set (l1, add (triple (), triple ()))"),
       P("let triple = \\(_:unit). mul (1, get l1) in "
         "set (l1, let y = triple () in add (y, y))")},
  };
  TermGen gen(mc, mc.cfg().seed);
  for (auto& pr : gen.completeness_pairs(220)) corpus.push_back(pr);

  CompletenessReport rep = verify_completeness(mc, corpus);
  std::ostringstream detail;
  detail << rep.cases.size() << " closed ground pairs ("
         << rep.equal_count << " equal, " << rep.unequal_count
         << " unequal); biconditional held in every case";
  verdict(7, "ground completeness (refined iff unrefined)", rep.all_ok,
          detail.str());
}

// ---- criterion 8: transformation validity -----------------------------------

void criterion8() {
  bool ok = true;
  std::ostringstream detail;
  std::string witness;

  auto rules = builtin_rules();
  const RewriteRule* cache = nullptr;
  for (const auto& r : rules)
    if (r.name == "CACHE") cache = &r;

  auto callee = [](const std::string& eps) -> std::string {
    if (eps == "pure") return "\\(_:unit). 1";
    if (eps == "get") return "\\(_:unit). get l1";
    if (eps == "set") return "\\(_:unit). let _ = set (l1, 1) in 0";
    return "\\(_:unit). let _ = set (l1, add (1, get l1)) in get l1";
  };

  // the proper-subset claim across |Loc| <= 2, k <= 3
  for (int nloc : {1, 2})
    for (int k : {2, 3}) {
      std::vector<std::string> locs{"l1"};
      if (nloc == 2) locs.push_back("l2");
      ModelContext mc(ModelConfig::standard("state", locs, k));
      auto P = [&](const std::string& s) { return parse_term(s, mc.sig()); };
      for (const char* eps : {"pure", "get", "set", "inc"}) {
        Term before =
            P("let f = " + callee(eps) + " in add (f (), f ())");
        Term after = P("let f = " + callee(eps) +
                       " in let y = f () in add (y, y)");
        ValidationReport rep = validate_instance(mc, before, after, "CACHE");
        bool expect_valid = std::string(eps) != "inc";
        ok = ok && rep.refined_valid == expect_valid;
        ok = ok && rep.transfer_ok;
        if (!expect_valid) {
          ok = ok && !rep.witness.empty();
          if (witness.empty()) witness = rep.witness;
        }
        // the guard agrees: CACHE sites exist exactly below the full effect
        auto sites = apply_rule(mc, *cache, before);
        ok = ok && (sites.empty() == !expect_valid);
      }
    }

  // REORDER valid exactly when check_commutative holds
  {
    ModelContext& mc = state_z2();
    auto P = [&](const std::string& s) { return parse_term(s, mc.sig()); };
    struct Inst {
      std::string lhs, rhs;
      Effect eps;
    };
    std::vector<Inst> insts = {
        {"(get l1, get l1)",
         "let xr = get l1 in let xl = get l1 in (xl, xr)", E({"get"})},
        {"(1, ())", "let xr = () in let xl = 1 in (xl, xr)",
         Effect::empty()},
        {"(get l1, set (l1, 1))",
         "let xr = set (l1, 1) in let xl = get l1 in (xl, xr)",
         E({"get", "set"})},
        {"(set (l1, 0), set (l1, 1))",
         "let xr = set (l1, 1) in let xl = set (l1, 0) in (xl, xr)",
         E({"set"})},
    };
    for (const auto& inst : insts) {
      Term lhs = P(inst.lhs);
      Term rhs = P(inst.rhs);
      auto [ta, ea] = infer(mc.sig(), Context{}, lhs);
      bool commutes = mc.family().check_commutative(
          inst.eps, interp_type(mc, ta.left(), Mode::Refined),
          interp_type(mc, ta.right(), Mode::Refined), nullptr);
      ValidationReport rep = validate_instance(mc, lhs, rhs, "REORDER");
      ok = ok && rep.refined_valid == commutes;
    }
  }

  // DISCARD valid for pure bound terms
  {
    ModelContext& mc = state_z2();
    auto P = [&](const std::string& s) { return parse_term(s, mc.sig()); };
    ValidationReport rep =
        validate_instance(mc, P("let u = () in 1"), P("1"), "DISCARD");
    ok = ok && rep.refined_valid;
  }

  detail << "caching matrix over 4 configs; invalid case witness: "
         << witness;
  verdict(8, "transformation validity", ok, detail.str());
}

// ---- criterion 9: property suites --------------------------------------------

void criterion9() {
  bool ok = true;
  std::ostringstream detail;
  std::mt19937_64 rng(2025);

  // parser/printer roundtrip
  {
    TermGen gen(state_z2(), 515);
    for (int i = 0; i < 200; ++i) {
      Term m = gen.arbitrary_term(1 + i % 4);
      ok = ok && parse_term(print_term(m), state_z2().sig()) == m;
    }
    detail << "roundtrip x200";
  }

  // factorisation functoriality and fill-in uniqueness by brute force
  {
    auto rand_fn = [&](const FinSetObj& dom, const FinSetObj& cod) {
      std::uniform_int_distribution<std::size_t> d(0, cod.size() - 1);
      std::vector<Elem> vals;
      for (std::size_t i = 0; i < dom.size(); ++i)
        vals.push_back(cod.elems()[d(rng)]);
      return FinFn::from_values(dom, cod, std::move(vals));
    };
    FinSetObj w = generic_object(4);
    FinSetObj ymid = generic_object(3);
    FinSetObj y2 = FinSetObj::from_elems(
        {Elem::atom("ya"), Elem::atom("yb")});
    FinSetObj z = FinSetObj::from_elems(
        {Elem::atom("za"), Elem::atom("zb"), Elem::atom("zc")});
    int uniq = 0;
    for (int round = 0; round < 50; ++round) {
      Factorisation fac = factorise(rand_fn(w, ymid));
      FinFn m(y2, z, [](const Elem& v) {
        return v == Elem::atom("ya") ? Elem::atom("za") : Elem::atom("zc");
      });
      FinFn h = rand_fn(fac.img, y2);
      FinFn f = fac.e.then(h);
      FinFn g = h.then(m);
      FinFn got = fill_in(fac.e, m, f, g);
      ok = ok && got == h;
      // brute-force: exactly one candidate satisfies both triangles
      std::size_t good = 0;
      std::vector<std::size_t> idx(fac.img.size(), 0);
      for (;;) {
        std::vector<Elem> vals;
        for (std::size_t i = 0; i < fac.img.size(); ++i)
          vals.push_back(y2.elems()[idx[i]]);
        FinFn cand = FinFn::from_values(fac.img, y2, vals);
        if (fac.e.then(cand) == f && cand.then(m) == g) ++good;
        std::size_t i = fac.img.size();
        bool done = false;
        for (;;) {
          if (i == 0) {
            done = true;
            break;
          }
          --i;
          if (++idx[i] < y2.size()) break;
          idx[i] = 0;
        }
        if (done) break;
      }
      ok = ok && good == 1;
      uniq += static_cast<int>(good);
    }
    detail << "; fill-in unique in " << uniq << "/50 squares";
  }

  // coercion coherence: inclusion functoriality on all chains
  {
    const GradedFamily& fam = state_z2().family();
    FinSetObj x = generic_object(2);
    bool coh = true;
    for (const Effect& a : subsets_of_sigma())
      for (const Effect& b : subsets_of_sigma())
        for (const Effect& c : subsets_of_sigma())
          if (a.subset_of(b) && b.subset_of(c))
            coh = coh && fam.inclusion(a, b, x).then(fam.inclusion(b, c, x)) ==
                             fam.inclusion(a, c, x);
    ok = ok && coh;
    detail << "; inclusion chains compose";
  }

  // lifting closure and desk-scale initiality
  {
    const GradedFamily& fam = state_z2().family();
    FinSetObj one = terminal_obj();
    bool lift_ok = true;
    for (const Effect& eps : subsets_of_sigma()) {
      Rel diag = Rel::diagonal(one);
      LiftedCarrier lift = free_lift(fam, eps, diag);
      lift_ok =
          lift_ok && check_lift_closure(fam, eps, diag, lift.pairs, nullptr);
      // exhaustive initiality where the pair universe is small
      const GradedCarrier& c = fam.carrier(eps, one);
      FinSetObj tx = fam.model().carrier(one);
      std::vector<std::pair<Elem, Elem>> universe;
      for (const Elem& a : c.subset().elems())
        for (const Elem& b : tx.elems()) universe.emplace_back(a, b);
      if (universe.size() <= 12) {
        for (std::size_t mask = 0; mask < (1u << universe.size()); ++mask) {
          std::vector<std::pair<Elem, Elem>> q;
          for (std::size_t i = 0; i < universe.size(); ++i)
            if (mask & (1u << i)) q.push_back(universe[i]);
          std::sort(q.begin(), q.end(),
                    [](const auto& p1, const auto& p2) {
                      int c0 = Elem::cmp(p1.first, p2.first);
                      if (c0 != 0) return c0 < 0;
                      return Elem::cmp(p1.second, p2.second) < 0;
                    });
          if (!check_lift_closure(fam, eps, diag, q, nullptr)) continue;
          for (const auto& p : lift.pairs)
            lift_ok = lift_ok &&
                      std::binary_search(
                          q.begin(), q.end(), p,
                          [](const auto& p1, const auto& p2) {
                            int c0 = Elem::cmp(p1.first, p2.first);
                            if (c0 != 0) return c0 < 0;
                            return Elem::cmp(p1.second, p2.second) < 0;
                          });
        }
      }
    }
    ok = ok && lift_ok;
    detail << "; lifting closure + initiality at desk scale";
  }

  verdict(9, "property suites", ok, detail.str());
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " criteria failed" << std::endl;
  return 1;
}
