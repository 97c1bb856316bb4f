#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ordmix/priors.hpp"
#include "ordmix/sampler.hpp"
#include "ordmix/simulation.hpp"

namespace ordmix {

inline constexpr int kConfigSchemaVersion = 1;

/*
 * Flat key = value text. Blank lines and lines starting with '#' are ignored;
 * keys are unique. `schema_version` must equal kConfigSchemaVersion when present.
 */
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "config");
  static ConfigFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  /// Comma- or whitespace-separated list.
  std::vector<std::string> get_list(const std::string& key) const;

  /// Keys never read by any getter, for reporting typos.
  std::vector<std::string> unused_keys() const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

/// Prior keys: beta_variance, sigma2_shape, sigma2_rate, pz_a, pz_b,
/// dirichlet_weight, penalty, lambda, lasso_precision_shape,
/// lasso_precision_rate, c0, r.
PriorConfig priors_from_config(const ConfigFile& cfg, PriorConfig base);

/// Chain keys: iterations, burn_in, thin, chains, seed, initial_step,
/// adapt_window, target_acceptance, joint_form_moves.
ChainConfig chain_from_config(const ConfigFile& cfg, ChainConfig base);

/*
 * Scenario keys: name, outcome, n, rho, percentiles, replications, min_cell,
 * intercept, residual_sd, baseline_hazard, censoring_rate, seed, plus the prior and chain
 * keys. `truth` lists one beta:form pair per predictor, form one of linear,
 * null or tauK, e.g. "truth = 0:tau1, 0.25:linear".
 */
ScenarioSpec scenario_from_config(const ConfigFile& cfg);

}  // namespace ordmix
