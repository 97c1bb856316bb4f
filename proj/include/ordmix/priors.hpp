#pragma once

#include <span>
#include <string>
#include <vector>

#include "ordmix/outcome.hpp"

namespace ordmix {

class Rng;

enum class PenaltyKind { None, Lasso, Horseshoe };

const char* to_string(PenaltyKind kind);
PenaltyKind parse_penalty(const std::string& text);

/*
 * Prior configuration.
 *
 * alpha ~ N(0, beta_variance); without a penalty each beta_j ~ N(0, beta_variance).
 * sigma^2 ~ InvGamma(sigma2_shape, sigma2_rate) for continuous outcomes.
 * Z_j ~ Bernoulli(p_z), p_z ~ Beta(pz_a, pz_b).
 * tau_j | Z_j = 0 ~ Categorical(pi_j), pi_j ~ Dirichlet(dirichlet_weight, ...).
 *
 * Lasso: beta_j ~ DE(0, lambda * v) with lambda * v the rate of the double
 * exponential, v the residual precision 1/sigma^2 for continuous outcomes and
 * v ~ Gamma(lasso_precision_shape, lasso_precision_rate) otherwise.
 *
 * Horseshoe: beta_j ~ N(0, lambda * g^2 * l_j^2) with g, l_j ~ C+(0, 1).
 *
 * Survival: cumulative baseline hazard ~ GP(c0 * Lambda*, c0) with prior
 * increments r * (t_{m+1} - t_m).
 */
struct PriorConfig {
  double beta_variance = 1000.0;
  double sigma2_shape = 0.01;
  double sigma2_rate = 0.01;
  double pz_a = 0.5;
  double pz_b = 0.5;
  double dirichlet_weight = 1.0;
  PenaltyKind penalty = PenaltyKind::None;
  double lambda = 1.0;
  double lasso_precision_shape = 0.01;
  double lasso_precision_rate = 0.01;
  double c0 = 0.001;
  double r = 0.01;

  /// Throws InvalidArgument unless every scale/shape/rate is positive and finite.
  void validate() const;
};

PriorConfig default_priors(OutcomeKind kind);

/// Per-chain auxiliary variables of the shrinkage hierarchies.
struct PenaltyAuxiliaries {
  // Lasso: conditional prior variance of beta_j in the exponential scale mixture.
  std::vector<double> local_scale;
  // Lasso: v. Mirrors 1/sigma^2 for continuous outcomes.
  double precision = 1.0;
  // Horseshoe: half-Cauchy scales and their inverse-gamma mixing variables.
  std::vector<double> local;
  std::vector<double> local_mix;
  double global = 1.0;
  double global_mix = 1.0;

  static PenaltyAuxiliaries initial(int predictors);
};

/// Rate of the double-exponential prior on each beta_j.
double lasso_rate(const PriorConfig& config, double precision);

/// Conditional prior variance of beta_j given the auxiliaries.
double beta_prior_variance(int j, const PenaltyAuxiliaries& aux, const PriorConfig& config);

/// Lasso local scales from their full conditionals:
/// 1/s_j ~ InvGauss(rate / |beta_j|, rate^2), or s_j ~ Gamma(1/2, rate^2 / 2) at beta_j = 0.
void update_lasso_auxiliaries(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                              double precision, Rng& rng);

/// v | beta with the local scales integrated out:
/// Gamma(shape + J, rate + lambda * sum |beta_j|). Used when the outcome has no residual variance.
void update_lasso_precision(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                            Rng& rng);

/// Horseshoe scales under the inverse-gamma parameter expansion
/// l^2 | a ~ IG(1/2, 1/a), a ~ IG(1/2, 1), which leaves l ~ C+(0, 1).
void update_horseshoe_auxiliaries(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                                  Rng& rng);

}  // namespace ordmix
