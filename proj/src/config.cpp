#include "effet/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace effet {

using nlohmann::json;

FinSetObj generic_object(std::size_t n) {
  std::vector<Elem> es;
  es.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    es.push_back(Elem::atom("x" + std::to_string(i)));
  return FinSetObj::from_elems(std::move(es));
}

FinSetObj ModelConfig::locs_obj() const {
  std::vector<Elem> es;
  for (const auto& l : loc_names) es.push_back(Elem::atom(l));
  return FinSetObj::from_elems(std::move(es));
}

FinSetObj ModelConfig::values_obj() const {
  std::vector<Elem> es;
  for (int i = 0; i < int_mod; ++i)
    es.push_back(Elem::atom(std::to_string(i)));
  return FinSetObj::from_elems(std::move(es));
}

FinSetObj ModelConfig::state_obj() const {
  return exponential(locs_obj(), values_obj());
}

ModelConfig ModelConfig::standard(const std::string& monad,
                                  std::vector<std::string> locs, int int_mod,
                                  int r_size) {
  if (int_mod < 1 || int_mod > 9)
    throw ConfigError("int_mod must be between 1 and 9");
  if (locs.empty()) throw ConfigError("at least one location is required");
  ModelConfig cfg;
  cfg.monad_name = monad;
  cfg.loc_names = std::move(locs);
  cfg.int_mod = int_mod;
  cfg.r_size = r_size;

  TypeExpr tint = TypeExpr::base("int");
  TypeExpr tloc = TypeExpr::base("Loc");
  cfg.sig.base_types = {"Loc", "int"};

  bool has_get = monad == "state" || monad == "reader" || monad == "cont_state";
  bool has_set = monad == "state" || monad == "writer" || monad == "cont_state";
  if (has_get) cfg.sig.operations.emplace("get", std::make_pair(tloc, tint));
  if (has_set)
    cfg.sig.operations.emplace(
        "set", std::make_pair(TypeExpr::prod(tloc, tint), TypeExpr::unit()));

  cfg.base_interp.emplace("Loc", cfg.locs_obj());
  cfg.base_interp.emplace("int", cfg.values_obj());

  TypeExpr binop = TypeExpr::arrow(TypeExpr::prod(tint, tint), Effect::empty(),
                                   tint);
  auto arith = [&](const Ident& name, auto fn) {
    ConstantDef def;
    def.type = binop;
    for (int a = 0; a < int_mod; ++a)
      for (int b = 0; b < int_mod; ++b)
        def.pure_table.emplace(
            Elem::pair(Elem::atom(std::to_string(a)),
                       Elem::atom(std::to_string(b))),
            Elem::atom(std::to_string(fn(a, b) % int_mod)));
    cfg.sig.constants.emplace(name, binop);
    cfg.constants.emplace(name, std::move(def));
  };
  arith("add", [](int a, int b) { return a + b; });
  arith("mul", [](int a, int b) { return a * b; });

  for (int i = 0; i < int_mod; ++i) {
    ConstantDef def;
    def.type = tint;
    def.ground_value = Elem::atom(std::to_string(i));
    cfg.sig.constants.emplace(std::to_string(i), tint);
    cfg.constants.emplace(std::to_string(i), std::move(def));
  }
  for (const auto& l : cfg.loc_names) {
    ConstantDef def;
    def.type = tloc;
    def.ground_value = Elem::atom(l);
    cfg.sig.constants.emplace(l, tloc);
    cfg.constants.emplace(l, std::move(def));
  }
  cfg.sig.validate();
  return cfg;
}

ModelConfig ModelConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::string monad = j.value("monad", "state");
  if (monad != "identity" && monad != "state" && monad != "reader" &&
      monad != "writer" && monad != "cont_state")
    throw ConfigError("unknown monad '" + monad + "'");
  json params = j.value("params", json::object());
  std::vector<std::string> locs =
      params.value("loc", std::vector<std::string>{"l1"});
  int int_mod = params.value("int_mod", 2);
  int r_size = params.value("r_size", 2);
  ModelConfig cfg = standard(monad, locs, int_mod, r_size);
  if (j.contains("limits")) {
    cfg.max_carrier = j["limits"].value("max_carrier", cfg.max_carrier);
    cfg.max_saturation =
        j["limits"].value("max_saturation", cfg.max_saturation);
  }
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

ModelConfig ModelConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

static std::shared_ptr<MonadModel> build_model(const ModelConfig& cfg) {
  set_size_limit(cfg.max_carrier);
  set_saturation_limit(cfg.max_saturation);
  FinSetObj locs = cfg.locs_obj();
  FinSetObj vals = cfg.values_obj();
  std::shared_ptr<MonadModel> m;
  if (cfg.monad_name == "identity") {
    m = identity_monad();
  } else if (cfg.monad_name == "state") {
    m = state_monad(cfg.state_obj());
  } else if (cfg.monad_name == "reader") {
    m = reader_monad(cfg.state_obj());
  } else if (cfg.monad_name == "writer") {
    m = writer_monad(overwriting_monoid(locs, vals));
  } else if (cfg.monad_name == "cont_state") {
    std::vector<Elem> rs;
    for (int i = 0; i < cfg.r_size; ++i)
      rs.push_back(Elem::atom("r" + std::to_string(i)));
    m = cont_state_monad(FinSetObj::from_elems(std::move(rs)),
                         cfg.state_obj());
  } else {
    throw ConfigError("unknown monad '" + cfg.monad_name + "'");
  }
  if (!cfg.sig.operations.empty()) m->install_state_ops(locs, vals);
  return m;
}

ModelContext::ModelContext(ModelConfig cfg)
    : cfg_(std::move(cfg)), model_(build_model(cfg_)), family_(model_) {}

std::optional<FinSetObj> ModelContext::type_memo_get(
    const std::string& key) const {
  std::lock_guard<std::mutex> lock(type_mu_);
  auto it = type_cache_.find(key);
  if (it == type_cache_.end()) return std::nullopt;
  return it->second;
}

void ModelContext::type_memo_put(const std::string& key,
                                 const FinSetObj& o) const {
  std::lock_guard<std::mutex> lock(type_mu_);
  type_cache_.emplace(key, o);
}

ModelContext ModelContext::load_file(const std::string& path) {
  return ModelContext(ModelConfig::from_file(path));
}

}  // namespace effet
