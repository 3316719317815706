#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effet/lifting.hpp"

namespace effet {

using RuleBindings = std::map<Ident, Term>;

/// A rewrite rule: term schemas with metavariables (variables whose names
/// start with '%', unreachable from the concrete syntax), plus an effect
/// guard. Guards are advisory; validation is always semantic.
struct RewriteRule {
  std::string name;
  Term lhs, rhs;
  /// guard(mc, site context, bindings, redex effect) -> ok
  std::function<bool(const ModelContext&, const Context&, const RuleBindings&,
                     const Effect&)>
      guard;
  /// fills derived metavariables of the rhs (fresh binders, bound types)
  std::function<void(const ModelContext&, const Context&, RuleBindings&)>
      derive;
  std::string description;
};

/// CACHE, DISCARD and REORDER.
std::vector<RewriteRule> builtin_rules();

struct RewriteSite {
  std::string path;  // e.g. "0.1" (child indices from the root)
  Term redex;
  Term replacement;
  Term rewritten;  // the whole term after rewriting at this site
};

/// All redex sites of `rule` in m (guards included); rewritten terms
/// re-typecheck at the original type with an effect below the original.
std::vector<RewriteSite> apply_rule(const ModelContext& mc,
                                    const RewriteRule& rule, const Term& m);

struct ValidationReport {
  std::string rule;
  Term before, after;
  bool refined_valid = false;
  std::string witness;
  bool ground = false;
  std::optional<bool> unrefined_equal;  // present for ground types
  bool transfer_ok = true;  // unrefined-equal iff refined-equal (ground only)
};

/// Semantic validation of one rewrite instance: refined table equality,
/// plus the completeness transfer at ground types.
ValidationReport validate_instance(const ModelContext& mc, const Term& before,
                                   const Term& after,
                                   const std::string& rule_name = "");

}  // namespace effet
