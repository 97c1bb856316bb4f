#include "ordmix/priors.hpp"

#include <algorithm>
#include <cmath>

#include "ordmix/error.hpp"
#include "ordmix/random.hpp"

namespace ordmix {

namespace {

constexpr double kMinVariance = 1e-12;
constexpr double kMaxVariance = 1e12;

void require_finite(std::span<const double> beta, const char* who) {
  for (double b : beta) {
    if (!std::isfinite(b)) throw Error(ErrorCode::NumericalError, std::string(who) + ": non-finite coefficient");
  }
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive and finite");
}

}  // namespace

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::Lasso: return "lasso";
    case PenaltyKind::Horseshoe: return "horseshoe";
  }
  return "unknown";
}

PenaltyKind parse_penalty(const std::string& text) {
  if (text == "none") return PenaltyKind::None;
  if (text == "lasso") return PenaltyKind::Lasso;
  if (text == "horseshoe") return PenaltyKind::Horseshoe;
  throw Error(ErrorCode::InvalidArgument, "unknown penalty '" + text + "'");
}

void PriorConfig::validate() const {
  require_positive(beta_variance, "beta_variance");
  require_positive(sigma2_shape, "sigma2_shape");
  require_positive(sigma2_rate, "sigma2_rate");
  require_positive(pz_a, "pz_a");
  require_positive(pz_b, "pz_b");
  require_positive(dirichlet_weight, "dirichlet_weight");
  require_positive(lasso_precision_shape, "lasso_precision_shape");
  require_positive(lasso_precision_rate, "lasso_precision_rate");
  require_positive(c0, "c0");
  require_positive(r, "r");
  if (penalty != PenaltyKind::None) require_positive(lambda, "lambda");
}

PriorConfig default_priors(OutcomeKind) {
  // Hyperparameters are shared across outcome families; survival-only fields
  // are ignored elsewhere.
  return PriorConfig{};
}

PenaltyAuxiliaries PenaltyAuxiliaries::initial(int predictors) {
  PenaltyAuxiliaries aux;
  aux.local_scale.assign(predictors, 1.0);
  aux.local.assign(predictors, 1.0);
  aux.local_mix.assign(predictors, 1.0);
  return aux;
}

double lasso_rate(const PriorConfig& config, double precision) { return config.lambda * precision; }

double beta_prior_variance(int j, const PenaltyAuxiliaries& aux, const PriorConfig& config) {
  double v = config.beta_variance;
  switch (config.penalty) {
    case PenaltyKind::None:
      return v;
    case PenaltyKind::Lasso:
      v = aux.local_scale[j];
      break;
    case PenaltyKind::Horseshoe:
      v = config.lambda * aux.global * aux.global * aux.local[j] * aux.local[j];
      break;
  }
  return std::clamp(v, kMinVariance, kMaxVariance);
}

void update_lasso_auxiliaries(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                              double precision, Rng& rng) {
  require_finite(beta, "lasso update");
  if (!(precision > 0.0) || !std::isfinite(precision))
    throw Error(ErrorCode::NumericalError, "lasso update: invalid precision");
  const double rate = lasso_rate(config, precision);
  aux.local_scale.resize(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    const double abs_b = std::fabs(beta[j]);
    double s;
    if (abs_b < 1e-300) {
      s = rng.gamma(0.5, 0.5 * rate * rate);
    } else {
      s = 1.0 / rng.inv_gauss(rate / abs_b, rate * rate);
    }
    aux.local_scale[j] = std::clamp(s, kMinVariance, kMaxVariance);
  }
}

void update_lasso_precision(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                            Rng& rng) {
  require_finite(beta, "lasso precision update");
  double abs_sum = 0.0;
  for (double b : beta) abs_sum += std::fabs(b);
  aux.precision = rng.gamma(config.lasso_precision_shape + static_cast<double>(beta.size()),
                            config.lasso_precision_rate + config.lambda * abs_sum);
}

void update_horseshoe_auxiliaries(PenaltyAuxiliaries& aux, std::span<const double> beta, const PriorConfig& config,
                                  Rng& rng) {
  require_finite(beta, "horseshoe update");
  const std::size_t J = beta.size();
  aux.local.resize(J, 1.0);
  aux.local_mix.resize(J, 1.0);
  const double g2 = aux.global * aux.global;
  double weighted = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double b2 = beta[j] * beta[j];
    const double l2 = std::clamp(rng.inv_gamma(1.0, 1.0 / aux.local_mix[j] + b2 / (2.0 * config.lambda * g2)),
                                 kMinVariance, kMaxVariance);
    aux.local[j] = std::sqrt(l2);
    aux.local_mix[j] = rng.inv_gamma(1.0, 1.0 + 1.0 / l2);
    weighted += b2 / l2;
  }
  const double new_g2 =
      std::clamp(rng.inv_gamma(0.5 * (static_cast<double>(J) + 1.0),
                               1.0 / aux.global_mix + weighted / (2.0 * config.lambda)),
                 kMinVariance, kMaxVariance);
  aux.global = std::sqrt(new_g2);
  aux.global_mix = rng.inv_gamma(1.0, 1.0 + 1.0 / new_g2);
}

}  // namespace ordmix
