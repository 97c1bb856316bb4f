#include <cmath>

#include "ordmix/error.hpp"
#include "ordmix/sampler.hpp"

namespace ordmix {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw Error(ErrorCode::NumericalError, std::string("non-finite ") + what);
}

}  // namespace

void MixtureSampler::update_linear_params() {
  update_linear_coefficients();
  update_sigma2();
}

void MixtureSampler::update_linear_coefficients() {
  const int J = design_.predictors();
  Eigen::MatrixXd P;
  Eigen::VectorXd b;
  linear_system(P, b);

  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "coefficient precision matrix is not positive definite");
  Eigen::VectorXd z(J + 1);
  for (int k = 0; k <= J; ++k) z[k] = rng_.normal();
  const Eigen::VectorXd theta = llt.solve(b) + llt.matrixU().solve(z);
  for (int k = 0; k <= J; ++k) check_finite(theta[k], "regression coefficient");

  state_.alpha = theta[0];
  for (int j = 0; j < J; ++j) state_.beta[j] = theta[j + 1];
  refresh_eta();
}

std::pair<double, double> MixtureSampler::sigma2_conditional() const {
  const double rss = (y_ - eta_).squaredNorm();
  double shape = priors_.sigma2_shape + 0.5 * design_.n();
  double rate = priors_.sigma2_rate + 0.5 * rss;
  if (priors_.penalty == PenaltyKind::Lasso) {
    // the double-exponential prior of each beta_j carries a factor of 1/sigma^2
    double l1 = 0.0;
    for (double b : state_.beta) l1 += std::abs(b);
    shape += design_.predictors();
    rate += priors_.lambda * l1;
  }
  return {shape, rate};
}

void MixtureSampler::update_sigma2() {
  const auto [shape, rate] = sigma2_conditional();
  const double s2 = rng_.inv_gamma(shape, rate);
  check_finite(s2, "sigma^2");
  if (!(s2 > 0.0)) throw Error(ErrorCode::NumericalError, "sigma^2 underflowed to zero");
  state_.sigma2 = s2;
  if (priors_.penalty == PenaltyKind::Lasso) state_.aux.precision = 1.0 / s2;
}

void MixtureSampler::update_logistic_params() {
  const Eigen::Index n = eta_.size();
  auto delta_loglik = [&](const Eigen::VectorXd* f, double delta) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double step = f ? delta * (*f)[i] : delta;
      if (step == 0.0) continue;
      const double e = eta_[i];
      d += y_[i] * step - softplus(e + step) + softplus(e);
    }
    return d;
  };

  {
    const double a_old = state_.alpha;
    const double a_new = a_old + steps_[0] * rng_.normal();
    const double va = priors_.beta_variance;
    const double log_ratio = delta_loglik(nullptr, a_new - a_old) - 0.5 * (a_new * a_new - a_old * a_old) / va;
    const bool accept = std::log(rng_.uniform()) < log_ratio;
    record_move(0, accept);
    if (accept) {
      eta_.array() += a_new - a_old;
      state_.alpha = a_new;
    }
  }
  for (int j = 0; j < design_.predictors(); ++j) {
    const Eigen::VectorXd& f = current_basis(j);
    const double b_old = state_.beta[j];
    const double b_new = b_old + steps_[j + 1] * rng_.normal();
    const double vb = prior_variance(j);
    const double log_ratio = delta_loglik(&f, b_new - b_old) - 0.5 * (b_new * b_new - b_old * b_old) / vb;
    const bool accept = std::log(rng_.uniform()) < log_ratio;
    record_move(j + 1, accept);
    if (accept) {
      eta_.noalias() += (b_new - b_old) * f;
      state_.beta[j] = b_new;
    }
  }
  check_finite(state_.alpha, "intercept");
}

void MixtureSampler::update_survival_params() {
  update_survival_coefficients();
  update_hazard_increments();
}

void MixtureSampler::update_survival_coefficients() {
  const Eigen::Index n = eta_.size();
  for (int j = 0; j < design_.predictors(); ++j) {
    const Eigen::VectorXd& f = current_basis(j);
    const double b_old = state_.beta[j];
    const double delta = steps_[j + 1] * rng_.normal();
    const double b_new = b_old + delta;
    const double vb = prior_variance(j);
    double log_ratio = -0.5 * (b_new * b_new - b_old * b_old) / vb;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double step = delta * f[i];
      if (step == 0.0) continue;
      log_ratio += events_[i] * step - std::exp(eta_[i]) * std::expm1(step) * cum_hazard_[i];
    }
    const bool accept = std::log(rng_.uniform()) < log_ratio;
    record_move(j + 1, accept);
    if (accept) {
      eta_.noalias() += delta * f;
      state_.beta[j] = b_new;
    }
  }
}

std::pair<double, double> MixtureSampler::hazard_conditional(int m) const {
  if (kind_ != OutcomeKind::Survival) throw Error(ErrorCode::InvalidArgument, "hazard increments need survival data");
  const Eigen::VectorXd w_vec = eta_.array().exp();
  const std::vector<double> w(w_vec.begin(), w_vec.end());
  const auto risk = grid_->risk_sums(w);
  return {priors_.c0 * grid_->prior_increments()[m] + grid_->events_at()[m], priors_.c0 + risk[m]};
}

void MixtureSampler::update_hazard_increments() {
  const Eigen::VectorXd w_vec = eta_.array().exp();
  const std::vector<double> w(w_vec.begin(), w_vec.end());
  const auto risk = grid_->risk_sums(w);
  const auto& prior_inc = grid_->prior_increments();
  const auto& d = grid_->events_at();
  for (int m = 0; m < grid_->size(); ++m) {
    const double shape = priors_.c0 * prior_inc[m] + d[m];
    const double rate = priors_.c0 + risk[m];
    double h = rng_.gamma(shape, rate);
    check_finite(h, "hazard increment");
    // increments without events can underflow; they stay strictly positive
    state_.hazard[m] = std::max(h, 1e-300);
  }
  refresh_cumulative_hazard();
}

}  // namespace ordmix
