#include "ordmix/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ordmix/error.hpp"

namespace ordmix {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, "key '" + key + "': '" + text + "' is not a number");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, "key '" + key + "': '" + text + "' is not an integer");
  return v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(number) + ": empty key");
    if (cfg.values_.count(key))
      throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  if (cfg.has("schema_version")) {
    const auto v = cfg.get_int("schema_version", kConfigSchemaVersion);
    if (v != kConfigSchemaVersion)
      throw Error(ErrorCode::ParseError, origin + ": unsupported schema_version " + std::to_string(v));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_[key] = true;
  return it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

long long ConfigFile::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  return v ? to_int(key, *v) : fallback;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
  std::vector<std::string> out;
  const auto v = get(key);
  if (!v) return out;
  std::string item;
  for (char c : *v + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

PriorConfig priors_from_config(const ConfigFile& cfg, PriorConfig p) {
  p.beta_variance = cfg.get_double("beta_variance", p.beta_variance);
  p.sigma2_shape = cfg.get_double("sigma2_shape", p.sigma2_shape);
  p.sigma2_rate = cfg.get_double("sigma2_rate", p.sigma2_rate);
  p.pz_a = cfg.get_double("pz_a", p.pz_a);
  p.pz_b = cfg.get_double("pz_b", p.pz_b);
  p.dirichlet_weight = cfg.get_double("dirichlet_weight", p.dirichlet_weight);
  if (const auto pen = cfg.get("penalty")) p.penalty = parse_penalty(*pen);
  p.lambda = cfg.get_double("lambda", p.lambda);
  p.lasso_precision_shape = cfg.get_double("lasso_precision_shape", p.lasso_precision_shape);
  p.lasso_precision_rate = cfg.get_double("lasso_precision_rate", p.lasso_precision_rate);
  p.c0 = cfg.get_double("c0", p.c0);
  p.r = cfg.get_double("r", p.r);
  return p;
}

ChainConfig chain_from_config(const ConfigFile& cfg, ChainConfig c) {
  c.n_iter = static_cast<int>(cfg.get_int("iterations", c.n_iter));
  c.burn_in = static_cast<int>(cfg.get_int("burn_in", c.burn_in));
  c.thin = static_cast<int>(cfg.get_int("thin", c.thin));
  c.n_chains = static_cast<int>(cfg.get_int("chains", c.n_chains));
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(c.seed)));
  c.initial_step = cfg.get_double("initial_step", c.initial_step);
  c.adapt_window = static_cast<int>(cfg.get_int("adapt_window", c.adapt_window));
  c.target_acceptance = cfg.get_double("target_acceptance", c.target_acceptance);
  if (const auto v = cfg.get("joint_form_moves")) {
    if (*v == "true" || *v == "1") {
      c.joint_form_moves = true;
    } else if (*v == "false" || *v == "0") {
      c.joint_form_moves = false;
    } else {
      throw Error(ErrorCode::ParseError, "key 'joint_form_moves': expected true or false");
    }
  }
  return c;
}

ScenarioSpec scenario_from_config(const ConfigFile& cfg) {
  ScenarioSpec s;
  s.name = cfg.get_string("name", s.name);
  s.outcome = parse_outcome_kind(cfg.get_string("outcome", "continuous"));
  s.n = static_cast<int>(cfg.get_int("n", s.n));
  s.rho = cfg.get_double("rho", s.rho);
  if (cfg.has("percentiles")) {
    s.percentiles.clear();
    for (const auto& p : cfg.get_list("percentiles")) s.percentiles.push_back(to_double("percentiles", p));
  }
  s.replications = static_cast<int>(cfg.get_int("replications", s.replications));
  s.min_cell = static_cast<int>(cfg.get_int("min_cell", s.min_cell));
  s.intercept = cfg.get_double("intercept", s.intercept);
  s.residual_sd = cfg.get_double("residual_sd", s.residual_sd);
  s.baseline_hazard = cfg.get_double("baseline_hazard", s.baseline_hazard);
  s.censoring_rate = cfg.get_double("censoring_rate", s.censoring_rate);
  s.priors = priors_from_config(cfg, default_priors(s.outcome));
  s.chain = chain_from_config(cfg, s.chain);
  s.seed = s.chain.seed;
  for (const auto& item : cfg.get_list("truth")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::ParseError, "truth entry '" + item + "' is not beta:form");
    s.truth.push_back(PredictorTruth::parse(to_double("truth", item.substr(0, colon)), item.substr(colon + 1)));
  }
  return s;
}

}  // namespace ordmix
