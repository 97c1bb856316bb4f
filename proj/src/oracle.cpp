#include "ordmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ordmix/error.hpp"

namespace ordmix {

namespace {

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Integrand over u = log sigma^2 for one configuration, with (alpha, beta) integrated out.
class SigmaIntegrand {
 public:
  SigmaIntegrand(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PriorConfig& priors)
      : yty_(y.squaredNorm()), n_(static_cast<double>(y.size())), p_(static_cast<double>(X.cols())),
        priors_(priors) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X.transpose() * X);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::NumericalError, "oracle: eigendecomposition failed");
    basis_ = eig.eigenvectors();
    values_ = eig.eigenvalues().cwiseMax(0.0);
    coef_ = basis_.transpose() * (X.transpose() * y);
    const double floor = values_.maxCoeff() * 1e-12 * p_;
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (values_[i] <= floor) {
        values_[i] = 0.0;
        coef_[i] = 0.0;
      }
    }
    log_det_v_ = p_ * std::log(priors.beta_variance);
  }

  double log_value(double u) const {
    const double s2 = std::exp(u);
    const Eigen::ArrayXd d = values_.array() + s2 / priors_.beta_variance;
    const double quad = std::max(0.0, yty_ - (coef_.array().square() / d).sum()) / s2;
    const double log_det_sigma = n_ * u + log_det_v_ + d.log().sum() - p_ * u;
    const double log_lik = -0.5 * n_ * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_sigma - 0.5 * quad;
    const double a = priors_.sigma2_shape;
    const double b = priors_.sigma2_rate;
    const double log_prior = a * std::log(b) - std::lgamma(a) - (a + 1.0) * u - b / s2;
    return log_lik + log_prior + u;
  }

  Eigen::VectorXd conditional_mean(double u) const {
    const Eigen::ArrayXd d = values_.array() + std::exp(u) / priors_.beta_variance;
    return basis_ * (coef_.array() / d).matrix();
  }

 private:
  Eigen::MatrixXd basis_;
  Eigen::VectorXd values_;
  Eigen::VectorXd coef_;
  double yty_;
  double n_;
  double p_;
  double log_det_v_ = 0.0;
  const PriorConfig& priors_;
};

double locate_mode(const SigmaIntegrand& f) {
  double best_u = 0.0;
  double best = -INFINITY;
  for (double u = -60.0; u <= 60.0; u += 0.25) {
    const double v = f.log_value(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  // golden-section refinement inside the bracketing grid cell
  double lo = best_u - 0.25;
  double hi = best_u + 0.25;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f.log_value(c);
  double fd = f.log_value(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f.log_value(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f.log_value(d);
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double integrate_around(F&& g, double mode) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kHalfWidth = 30.0;
  return gauss_kronrod<double, 61>::integrate(g, mode - kHalfWidth, mode, 20, 1e-13) +
         gauss_kronrod<double, 61>::integrate(g, mode, mode + kHalfWidth, 20, 1e-13);
}

Eigen::MatrixXd design_matrix(const OrdinalDesign& design, const std::vector<TransformConfig>& cfgs) {
  Eigen::MatrixXd X(design.n(), design.predictors() + 1);
  X.col(0).setOnes();
  for (int j = 0; j < design.predictors(); ++j) {
    const auto f = transform_predictor(design, j, cfgs[j]);
    X.col(j + 1) = Eigen::Map<const Eigen::VectorXd>(f.data(), design.n());
  }
  return X;
}

}  // namespace

double log_marginal_likelihood(const OrdinalDesign& design, const ContinuousOutcome& outcome,
                               const PriorConfig& priors, const std::vector<TransformConfig>& cfgs,
                               std::vector<double>* beta_mean) {
  priors.validate();
  validate_outcome(OutcomeData{outcome}, design.n());
  if (static_cast<int>(cfgs.size()) != design.predictors())
    throw Error(ErrorCode::DimensionMismatch, "one configuration per predictor is required");
  const Eigen::MatrixXd X = design_matrix(design, cfgs);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(outcome.y.data(), design.n());
  const SigmaIntegrand f(X, y, priors);

  const double mode = locate_mode(f);
  const double peak = f.log_value(mode);
  auto weight = [&](double u) { return std::exp(f.log_value(u) - peak); };
  const double mass = integrate_around(weight, mode);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::NumericalError, "oracle: sigma^2 integral is degenerate");

  if (beta_mean) {
    beta_mean->assign(design.predictors(), 0.0);
    for (int j = 0; j < design.predictors(); ++j) {
      auto moment = [&](double u) { return weight(u) * f.conditional_mean(u)[j + 1]; };
      (*beta_mean)[j] = integrate_around(moment, mode) / mass;
    }
  }
  return peak + std::log(mass);
}

double log_configuration_prior(const OrdinalDesign& design, const PriorConfig& priors,
                               const std::vector<TransformConfig>& cfgs) {
  if (static_cast<int>(cfgs.size()) != design.predictors())
    throw Error(ErrorCode::DimensionMismatch, "one configuration per predictor is required");
  double linear = 0.0;
  double lp = 0.0;
  for (int j = 0; j < design.predictors(); ++j) {
    if (!design.admissible(j, cfgs[j]))
      throw Error(ErrorCode::InvalidArgument, "inadmissible configuration for " + design.name(j));
    if (cfgs[j].is_linear()) {
      linear += 1.0;
    } else {
      // single Dirichlet-categorical draw with equal concentrations
      lp -= std::log(static_cast<double>(design.cutoffs(j).size()));
    }
  }
  const double J = static_cast<double>(design.predictors());
  lp += log_beta_fn(priors.pz_a + linear, priors.pz_b + J - linear) - log_beta_fn(priors.pz_a, priors.pz_b);
  return lp;
}

ExactPosterior enumerate_posterior(const OrdinalDesign& design, const ContinuousOutcome& outcome,
                                   const PriorConfig& priors, std::size_t max_configurations) {
  if (priors.penalty != PenaltyKind::None)
    throw Error(ErrorCode::UnsupportedPenalty, "the exact posterior is available without a penalty only");
  const int J = design.predictors();
  std::size_t total = 1;
  for (int j = 0; j < J; ++j) {
    const auto c = static_cast<std::size_t>(design.config_count(j));
    if (total > max_configurations / c)
      throw Error(ErrorCode::TooManyConfigurations,
                  "configuration count exceeds the cap of " + std::to_string(max_configurations));
    total *= c;
  }

  ExactPosterior out;
  std::vector<int> index(J, 0);
  std::vector<double> log_post;
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<TransformConfig> cfgs(J);
    for (int j = 0; j < J; ++j) cfgs[j] = design.config_at(j, index[j]);
    std::vector<double> bm;
    const double lml = log_marginal_likelihood(design, outcome, priors, cfgs, &bm);
    out.configurations.push_back(cfgs);
    out.log_marginal.push_back(lml);
    out.beta_mean.push_back(std::move(bm));
    log_post.push_back(lml + log_configuration_prior(design, priors, cfgs));
    for (int j = J - 1; j >= 0; --j) {
      if (++index[j] < design.config_count(j)) break;
      index[j] = 0;
    }
  }

  const double top = *std::max_element(log_post.begin(), log_post.end());
  double norm = 0.0;
  for (double lp : log_post) norm += std::exp(lp - top);
  out.p_z1.assign(J, 0.0);
  out.p_tau.resize(J);
  out.beta_posterior_mean.assign(J, 0.0);
  for (int j = 0; j < J; ++j) out.p_tau[j].assign(design.cutoffs(j).size(), 0.0);
  for (std::size_t c = 0; c < total; ++c) {
    const double p = std::exp(log_post[c] - top) / norm;
    out.probability.push_back(p);
    for (int j = 0; j < J; ++j) {
      const int form = design.config_index(j, out.configurations[c][j]);
      if (form == 0) {
        out.p_z1[j] += p;
      } else {
        out.p_tau[j][form - 1] += p;
      }
      out.beta_posterior_mean[j] += p * out.beta_mean[c][j];
    }
  }
  return out;
}

}  // namespace ordmix
