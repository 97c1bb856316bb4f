#pragma once

#include <cstddef>
#include <vector>

#include "ordmix/design.hpp"
#include "ordmix/outcome.hpp"
#include "ordmix/priors.hpp"

namespace ordmix {

/// Exact posterior over every (Z, tau) configuration of a continuous-outcome
/// model without penalty.
struct ExactPosterior {
  std::vector<std::vector<TransformConfig>> configurations;
  std::vector<double> probability;
  std::vector<std::vector<double>> beta_mean;  // E[beta | configuration, y]
  std::vector<double> log_marginal;            // log p(y | configuration)
  std::vector<double> p_z1;                    // per predictor
  std::vector<std::vector<double>> p_tau;      // P(tau = cutoffs[k], Z = 0)
  std::vector<double> beta_posterior_mean;     // averaged over configurations
};

/// log p(y | configuration) with alpha ~ N(0, V), beta_j ~ N(0, V) and
/// sigma^2 ~ InvGamma(a, b) independent a priori. (alpha, beta) are integrated
/// in closed form; sigma^2 by adaptive Gauss-Kronrod quadrature over log sigma^2.
/// `beta_mean`, when given, receives E[beta | configuration, y].
double log_marginal_likelihood(const OrdinalDesign& design, const ContinuousOutcome& outcome,
                               const PriorConfig& priors, const std::vector<TransformConfig>& cfgs,
                               std::vector<double>* beta_mean = nullptr);

/// log p(configuration) with p_z and every pi_j integrated out.
double log_configuration_prior(const OrdinalDesign& design, const PriorConfig& priors,
                               const std::vector<TransformConfig>& cfgs);

ExactPosterior enumerate_posterior(const OrdinalDesign& design, const ContinuousOutcome& outcome,
                                   const PriorConfig& priors, std::size_t max_configurations = 4096);

}  // namespace ordmix
