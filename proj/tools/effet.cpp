// effet: a workbench for effect-graded semantics of a small computational
// lambda-calculus over finite-set models.
//
// Exit codes: 0 all checks passed, 1 a semantic check failed, 2 usage or
// config error, 3 a size/saturation limit was hit.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "effet/config.hpp"
#include "effet/grading.hpp"
#include "effet/lifting.hpp"
#include "effet/semantics.hpp"
#include "effet/termgen.hpp"
#include "effet/transforms.hpp"

using namespace effet;
using nlohmann::json;

namespace {

struct Output {
  bool as_json = false;
  json j = json::object();
  std::ostringstream text;

  void line(const std::string& s) { text << s << "\n"; }
  void flush() {
    if (as_json)
      std::cout << j.dump(2) << "\n";
    else
      std::cout << text.str();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Program files hold one term, or several separated by lines containing
// only '==='.
std::vector<std::string> split_sections(const std::string& text) {
  std::vector<std::string> sections{""};
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\r'))
      trimmed.pop_back();
    if (trimmed == "===")
      sections.emplace_back();
    else
      sections.back() += line + "\n";
  }
  return sections;
}

ModelConfig default_config() {
  return ModelConfig::standard("state", {"loc1"}, 8);
}

std::size_t g_max_carrier_override = 0;
std::size_t g_max_saturation_override = 0;

ModelContext load_model(const std::string& model_path) {
  ModelConfig cfg = model_path.empty() ? default_config()
                                       : ModelConfig::from_file(model_path);
  if (g_max_carrier_override > 0) cfg.max_carrier = g_max_carrier_override;
  if (g_max_saturation_override > 0)
    cfg.max_saturation = g_max_saturation_override;
  return ModelContext(std::move(cfg));
}

std::vector<Effect> all_effects(const Signature& sig) {
  std::vector<Ident> ops;
  for (const auto& [op, _] : sig.operations) ops.push_back(op);
  std::vector<Effect> out;
  for (std::size_t mask = 0; mask < (1u << ops.size()); ++mask) {
    std::vector<Ident> sel;
    for (std::size_t i = 0; i < ops.size(); ++i)
      if (mask & (1u << i)) sel.push_back(ops[i]);
    out.push_back(Effect::of(std::move(sel)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_check(const std::string& file, const std::string& model, Output& out) {
  ModelContext mc = load_model(model);
  std::string text = read_file(file);
  json results = json::array();
  int rc = 0;
  for (const std::string& sec : split_sections(text)) {
    if (sec.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      Term m = parse_term(sec, mc.sig());
      auto [ty, ef] = infer(mc.sig(), Context{}, m);
      Judgment j{Context{}, m, ty, ef};
      out.line(j.str());
      results.push_back({{"term", print_term(m)},
                         {"type", ty.str()},
                         {"effect", ef.str()},
                         {"ok", true}});
    } catch (const Error& e) {
      out.line(std::string("error: ") + e.what());
      results.push_back({{"ok", false}, {"error", e.what()}});
      rc = 1;
    }
  }
  out.j = {{"command", "check"}, {"results", results}};
  return rc;
}

int cmd_eval(const std::string& model, const std::string& term_or_file,
             const std::string& mode, Output& out) {
  ModelContext mc = load_model(model);
  std::string text = term_or_file;
  if (!term_or_file.empty() && term_or_file[0] == '@')
    text = read_file(term_or_file.substr(1));
  Term m = parse_term(text, mc.sig());
  json results = json::array();
  auto run = [&](Mode md, const char* label) {
    Denotation d = md == Mode::Refined
                       ? interp_refined(mc, Context{}, m)
                       : interp_unrefined(mc, Context{}, m);
    out.line(d.j.str());
    out.line(std::string(label) + " value: " + d.value().str());
    results.push_back({{"mode", label},
                       {"judgment", d.j.str()},
                       {"value", d.value().str()}});
  };
  if (mode == "refined" || mode == "both") run(Mode::Refined, "refined");
  if (mode == "unrefined" || mode == "both") run(Mode::Unrefined, "unrefined");
  out.j = {{"command", "eval"}, {"results", results}};
  return 0;
}

int cmd_equiv(const std::string& model, const std::string& pairfile,
              const std::string& mode, Output& out) {
  ModelContext mc = load_model(model);
  auto sections = split_sections(read_file(pairfile));
  std::vector<std::string> terms;
  for (const auto& s : sections)
    if (s.find_first_not_of(" \t\r\n") != std::string::npos) terms.push_back(s);
  if (terms.size() != 2)
    throw ConfigError("equiv needs a pair file with two terms separated by "
                      "a line '==='");
  Term m = parse_term(terms[0], mc.sig());
  Term n = parse_term(terms[1], mc.sig());
  bool all_equal = true;
  json results = json::array();
  std::vector<std::string> verdicts;
  auto run = [&](Mode md, const char* label) {
    EquivResult r = equiv(mc, m, n, md);
    verdicts.push_back(r.equal ? "EQUAL" : "NOT EQUAL");
    json res = {{"mode", label}, {"equal", r.equal}};
    if (!r.equal) {
      res["witness"] = r.witness;
      all_equal = false;
    }
    results.push_back(res);
  };
  if (mode == "refined" || mode == "both") run(Mode::Refined, "refined");
  if (mode == "unrefined" || mode == "both") run(Mode::Unrefined, "unrefined");
  std::string joined;
  for (std::size_t i = 0; i < verdicts.size(); ++i)
    joined += (i ? " / " : "") + verdicts[i];
  out.line(joined);
  for (const auto& r : results)
    if (r.contains("witness"))
      out.line("witness (" + r["mode"].get<std::string>() +
               "): " + r["witness"].get<std::string>());
  out.j = {{"command", "equiv"}, {"results", results}};
  return all_equal ? 0 : 1;
}

int cmd_grade(const std::string& model, const std::string& objects,
              Output& out) {
  ModelContext mc = load_model(model);
  std::vector<std::size_t> sizes;
  std::istringstream in(objects);
  std::string tok;
  while (std::getline(in, tok, ',')) sizes.push_back(std::stoul(tok));
  if (sizes.empty()) sizes = {1, 2};
  json rows = json::array();
  std::ostringstream head;
  head << "eps";
  for (std::size_t s : sizes) head << "\t|X|=" << s;
  out.line(head.str());
  for (const Effect& eps : all_effects(mc.sig())) {
    std::ostringstream row;
    row << eps.str();
    json cells = json::array();
    for (std::size_t s : sizes) {
      const GradedCarrier& c = mc.family().carrier(eps, generic_object(s));
      row << "\t" << c.subset().size();
      cells.push_back(c.subset().size());
    }
    out.line(row.str());
    rows.push_back({{"eps", eps.str()}, {"cardinalities", cells}});
  }
  out.j = {{"command", "grade"}, {"rows", rows}};
  return 0;
}

int cmd_laws(const std::string& model, std::size_t max_size, Output& out) {
  ModelContext mc = load_model(model);
  std::vector<FinSetObj> objects;
  for (std::size_t s = 1; s <= max_size; ++s)
    objects.push_back(generic_object(s));
  LawReport rep = check_monad_laws(mc.model(), objects);
  // graded carriers computed for every effect at small sizes
  for (const Effect& eps : all_effects(mc.sig()))
    for (std::size_t s = 1; s <= std::min<std::size_t>(2, max_size); ++s) {
      LawReport g = check_graded_laws(mc.family(), eps, generic_object(s),
                                      generic_object(s));
      rep.results.insert(rep.results.end(), g.results.begin(),
                         g.results.end());
    }
  out.text << rep.summary();
  json rows = json::array();
  for (const auto& r : rep.results)
    rows.push_back({{"law", r.law},
                    {"scope", r.scope},
                    {"status", r.status == LawStatus::Pass
                                   ? "pass"
                                   : r.status == LawStatus::Fail ? "fail"
                                                                 : "skip"},
                    {"checked", r.checked},
                    {"detail", r.detail}});
  out.j = {{"command", "laws"}, {"results", rows}};
  return rep.all_pass() ? 0 : 1;
}

int cmd_lift_verify(const std::string& model, std::size_t max_size,
                    Output& out) {
  ModelContext mc = load_model(model);
  bool all = true;
  json rows = json::array();
  for (const Effect& eps : all_effects(mc.sig()))
    for (std::size_t s = 1; s <= max_size; ++s) {
      MonoLemmaReport r =
          verify_mono_lemma(mc.family(), eps, generic_object(s));
      out.line(std::string(r.pass ? "pass" : "FAIL") + "  mono lemma at " +
               eps.str() + ", |X|=" + std::to_string(s) + " (" +
               std::to_string(r.pairs_checked) + " pairs)" +
               (r.pass ? "" : ": " + r.detail));
      rows.push_back({{"eps", eps.str()},
                      {"size", s},
                      {"pass", r.pass},
                      {"pairs", r.pairs_checked}});
      all = all && r.pass;
    }
  out.j = {{"command", "lift-verify"}, {"results", rows}};
  return all ? 0 : 1;
}

int cmd_validate(const std::string& model, const std::string& corpus,
                 std::size_t generate, Output& out) {
  ModelContext mc = load_model(model);
  json rows = json::array();
  bool sound = true;
  auto report = [&](const std::string& name, const Term& lhs, const Term& rhs,
                    std::optional<bool> guard_claims) {
    ValidationReport r = validate_instance(mc, lhs, rhs, name);
    std::string verdict = r.refined_valid ? "VALID" : "INVALID";
    std::ostringstream line;
    line << verdict << "  " << name << ": " << print_term(lhs) << "  ~>  "
         << print_term(rhs);
    out.line(line.str());
    if (!r.refined_valid) out.line("  witness: " + r.witness);
    if (r.ground)
      out.line(std::string("  transfer: unrefined ") +
               (*r.unrefined_equal ? "EQUAL" : "NOT EQUAL") +
               (r.transfer_ok ? " (biconditional holds)"
                              : " (biconditional FAILS)"));
    bool consistent = !guard_claims || (*guard_claims == r.refined_valid);
    if (!consistent)
      out.line("  guard prediction disagrees with semantics");
    sound = sound && consistent && r.transfer_ok;
    rows.push_back({{"rule", name},
                    {"lhs", print_term(lhs)},
                    {"rhs", print_term(rhs)},
                    {"refined_valid", r.refined_valid},
                    {"witness", r.witness}});
  };

  if (!corpus.empty()) {
    json c = json::parse(read_file(corpus));
    for (const auto& inst : c.at("instances")) {
      Term lhs = parse_term(inst.at("lhs").get<std::string>(), mc.sig());
      Term rhs = parse_term(inst.at("rhs").get<std::string>(), mc.sig());
      std::optional<bool> claims;
      if (inst.contains("valid")) claims = inst["valid"].get<bool>();
      report(inst.value("name", "instance"), lhs, rhs, claims);
    }
  }
  if (generate > 0) {
    // guarded rewrites found by the builtin rules on generated terms are
    // expected to be semantics-preserving
    TermGen gen(mc, mc.cfg().seed);
    auto rules = builtin_rules();
    std::size_t found = 0;
    for (std::size_t i = 0; i < generate * 8 && found < generate; ++i) {
      TypeExpr g = gen.ground_type(1);
      Term m = gen.ground_term(g, gen.effect_budget(), 3);
      for (const auto& rule : rules) {
        for (const RewriteSite& site : apply_rule(mc, rule, m)) {
          report(rule.name, m, site.rewritten, true);
          ++found;
          break;
        }
        if (found >= generate) break;
      }
    }
    out.line("guarded generated instances validated: " +
             std::to_string(found));
  }
  out.j = {{"command", "validate"}, {"results", rows}};
  return sound ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "effet: type-and-effect workbench over finite-set monad models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string model, format = "text";
  app.add_option("--format", format, "text|json")->capture_default_str();
  std::size_t max_carrier = 0, max_saturation = 0;
  app.add_option("--max-carrier", max_carrier, "size limit override");
  app.add_option("--max-saturation", max_saturation,
                 "saturation limit override");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "generator seed override");

  auto* check = app.add_subcommand("check", "typecheck a program file");
  std::string check_file;
  check->add_option("file", check_file, "program file")->required();
  check->add_option("--model", model, "model config (JSON)");

  auto* eval = app.add_subcommand("eval", "evaluate a closed term");
  std::string eval_model, eval_term, eval_mode = "refined";
  eval->add_option("model", eval_model, "model config (JSON)")->required();
  eval->add_option("term", eval_term, "term text, or @file")->required();
  eval->add_option("--mode", eval_mode, "refined|unrefined|both")
      ->capture_default_str();

  auto* equivc = app.add_subcommand("equiv", "compare two closed terms");
  std::string eq_model, eq_pair, eq_mode = "both";
  equivc->add_option("model", eq_model, "model config (JSON)")->required();
  equivc->add_option("pairfile", eq_pair, "file with two terms split by ===")
      ->required();
  equivc->add_option("--mode", eq_mode, "refined|unrefined|both")
      ->capture_default_str();

  auto* grade = app.add_subcommand("grade", "print graded carrier sizes");
  std::string gr_model, gr_objects = "1,2";
  grade->add_option("model", gr_model, "model config (JSON)")->required();
  grade->add_option("--objects", gr_objects, "comma-separated object sizes")
      ->capture_default_str();

  auto* laws = app.add_subcommand("laws", "run the monad law suites");
  std::string laws_model;
  std::size_t laws_size = 3;
  laws->add_option("model", laws_model, "model config (JSON)")->required();
  laws->add_option("--max-size", laws_size, "largest object size")
      ->capture_default_str();

  auto* lift = app.add_subcommand("lift-verify", "run the mono-lemma checks");
  std::string lift_model;
  std::size_t lift_size = 2;
  lift->add_option("model", lift_model, "model config (JSON)")->required();
  lift->add_option("--max-size", lift_size, "largest object size")
      ->capture_default_str();

  auto* validate =
      app.add_subcommand("validate", "validate rewrite instances");
  std::string val_model, val_corpus;
  std::size_t val_generate = 0;
  validate->add_option("model", val_model, "model config (JSON)")->required();
  validate->add_option("corpus", val_corpus, "instances JSON file");
  validate->add_option("--generate", val_generate,
                       "also validate N generated guarded rewrites");

  CLI11_PARSE(app, argc, argv);

  Output out;
  out.as_json = format == "json";

  try {
    g_max_carrier_override = max_carrier;
    g_max_saturation_override = max_saturation;
    int rc = 0;
    if (*check) rc = cmd_check(check_file, model, out);
    if (*eval) rc = cmd_eval(eval_model, eval_term, eval_mode, out);
    if (*equivc) rc = cmd_equiv(eq_model, eq_pair, eq_mode, out);
    if (*grade) rc = cmd_grade(gr_model, gr_objects, out);
    if (*laws) rc = cmd_laws(laws_model, laws_size, out);
    if (*lift) rc = cmd_lift_verify(lift_model, lift_size, out);
    if (*validate) rc = cmd_validate(val_model, val_corpus, val_generate, out);
    out.flush();
    return rc;
  } catch (const SizeLimitExceeded& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 3;
  } catch (const SaturationLimitExceeded& e) {
    std::cerr << "saturation limit: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
