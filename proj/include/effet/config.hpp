#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "effet/grading.hpp"
#include "effet/monad.hpp"
#include "effet/syntax.hpp"
#include "effet/typing.hpp"

namespace effet {

/// How a constant's unrefined interpretation is given.
struct ConstantDef {
  TypeExpr type;
  // ground constants: the denotation element itself
  Elem ground_value;
  // first-order pure arrows G1 -{}-> G2: a pure table |G1| -> |G2|;
  // the loader wraps outputs in unit
  std::map<Elem, Elem> pure_table;
  // escape hatch used by tests: a raw element of the unrefined arrow
  // denotation (outputs are T-elements, possibly impure)
  std::optional<Elem> raw_arrow_value;
};

/// A fully interpreted model: signature, base-type interpretations, monad
/// choice, constants, and limits. Loadable from the JSON config format.
struct ModelConfig {
  Signature sig;
  std::string monad_name;  // identity | state | reader | writer | cont_state
  std::vector<std::string> loc_names;
  int int_mod = 2;
  int r_size = 2;
  std::size_t max_carrier = 1'000'000;
  std::size_t max_saturation = 100'000;
  std::uint64_t seed = 42;

  std::map<Ident, FinSetObj> base_interp;
  std::map<Ident, ConstantDef> constants;

  static ModelConfig from_json_text(const std::string& text);
  static ModelConfig from_file(const std::string& path);

  /// The standard global-state workbench config over the given parameters:
  /// base types Loc and int, operations get/set as the monad kind admits,
  /// constants add/mul, the numerals of Z_k, and one constant per location.
  static ModelConfig standard(const std::string& monad,
                              std::vector<std::string> locs, int int_mod,
                              int r_size = 2);

  FinSetObj locs_obj() const;
  FinSetObj values_obj() const;  // Z_k
  FinSetObj state_obj() const;   // values^locs
};

/// A loaded model: config plus the built monad and its graded family.
class ModelContext {
 public:
  explicit ModelContext(ModelConfig cfg);
  static ModelContext load_file(const std::string& path);

  const ModelConfig& cfg() const { return cfg_; }
  const Signature& sig() const { return cfg_.sig; }
  const MonadModel& model() const { return *model_; }
  std::shared_ptr<const MonadModel> model_ptr() const { return model_; }
  const GradedFamily& family() const { return family_; }

  /// Memo used by the type interpreter (keyed on printed type + mode).
  std::optional<FinSetObj> type_memo_get(const std::string& key) const;
  void type_memo_put(const std::string& key, const FinSetObj& o) const;

 private:
  ModelConfig cfg_;
  std::shared_ptr<MonadModel> model_;
  GradedFamily family_;
  mutable std::mutex type_mu_;
  mutable std::map<std::string, FinSetObj> type_cache_;
};

/// The canonical object {x0, .., x_{n-1}} used for generic carrier probes.
FinSetObj generic_object(std::size_t n);

}  // namespace effet
