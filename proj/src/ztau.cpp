#include <cmath>
#include <sstream>

#include "ordmix/error.hpp"
#include "ordmix/sampler.hpp"

namespace ordmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(const std::vector<double>& v) {
  double top = -INFINITY;
  for (double x : v) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

[[noreturn]] void throw_degenerate(int j, const std::vector<double>& log_weights) {
  std::ostringstream msg;
  msg << "every form of predictor " << j + 1 << " has zero probability; log weights:";
  for (double w : log_weights) msg << ' ' << w;
  throw Error(ErrorCode::NumericalError, msg.str());
}

// Gaussian approximation at the mode of a strictly concave log density.
template <int D>
struct LaplaceFit {
  using Vec = Eigen::Matrix<double, D, 1>;
  using Mat = Eigen::Matrix<double, D, D>;
  Vec mode = Vec::Zero();
  Mat chol_precision = Mat::Identity();  // lower factor of -Hessian at the mode
  double log_target = 0.0;

  // log of the integral of the Gaussian approximation, up to the target value
  double log_normaliser() const {
    return 0.5 * D * kLog2Pi - chol_precision.diagonal().array().log().sum();
  }
  double log_density(const Vec& theta) const {
    const Vec u = chol_precision.transpose() * (theta - mode);
    return -0.5 * D * kLog2Pi + chol_precision.diagonal().array().log().sum() - 0.5 * u.squaredNorm();
  }
  Vec draw(Rng& rng) const {
    Vec z;
    for (int d = 0; d < D; ++d) z[d] = rng.normal();
    return mode + chol_precision.transpose().template triangularView<Eigen::Upper>().solve(z);
  }
};

// Damped Newton ascent from the origin. eval(theta, grad, hess) returns the log target.
template <int D, class Eval>
LaplaceFit<D> laplace_fit(Eval&& eval) {
  using Vec = typename LaplaceFit<D>::Vec;
  using Mat = typename LaplaceFit<D>::Mat;
  LaplaceFit<D> fit;
  Vec theta = Vec::Zero();
  Vec grad;
  Mat hess;
  double value = eval(theta, &grad, &hess);
  Vec next_grad;
  Mat next_hess;
  for (int it = 0; it < 100; ++it) {
    Eigen::LLT<Mat> llt(-hess);
    if (llt.info() != Eigen::Success) break;
    const Vec step = llt.solve(grad);
    double t = 1.0;
    Vec next = theta + step;
    double next_value = eval(next, &next_grad, &next_hess);
    while (!(next_value >= value - 1e-12) && t > 1e-10) {
      t *= 0.5;
      next = theta + t * step;
      next_value = eval(next, &next_grad, &next_hess);
    }
    if (!(next_value >= value - 1e-12)) break;
    theta = next;
    value = next_value;
    grad = next_grad;
    hess = next_hess;
    if ((t * step).norm() < 1e-9) break;
  }
  Eigen::LLT<Mat> llt(-hess);
  if (llt.info() != Eigen::Success || !std::isfinite(value))
    throw Error(ErrorCode::NumericalError, "Laplace approximation failed: non-concave or non-finite target");
  fit.mode = theta;
  fit.chol_precision = llt.matrixL();
  fit.log_target = value;
  return fit;
}

}  // namespace

std::vector<double> MixtureSampler::ztau_log_weights(int j, bool collapsed) const {
  const int forms = design_.config_count(j);
  std::vector<double> out(forms);
  const double bj = state_.beta[j];
  const Eigen::VectorXd& f_cur = current_basis(j);

  if (collapsed) {
    if (kind_ != OutcomeKind::Continuous)
      throw Error(ErrorCode::InvalidArgument, "collapsed form update needs a continuous outcome");
    const int J = design_.predictors();
    const double s2 = state_.sigma2;
    Eigen::MatrixXd P;
    Eigen::VectorXd b;
    linear_system(P, b);
    std::vector<int> cols(J + 1, 0);
    for (int k = 0; k < J; ++k) cols[k + 1] = column_of(k, design_.config_index(k, state_.cfg[k]));
    const double prior_j = 1.0 / prior_variance(j);
    for (int c = 0; c < forms; ++c) {
      cols[j + 1] = column_of(j, c);
      for (int k = 0; k <= J; ++k) {
        P(j + 1, k) = P(k, j + 1) = cross_(cols[j + 1], cols[k]) / s2;
      }
      P(j + 1, j + 1) += prior_j;
      b[j + 1] = cross_y_[cols[j + 1]] / s2;
      Eigen::LLT<Eigen::MatrixXd> llt(P);
      if (llt.info() != Eigen::Success) {
        out[c] = -INFINITY;
        continue;
      }
      const Eigen::VectorXd u = llt.matrixL().solve(b);
      const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
      out[c] = -0.5 * log_det + 0.5 * u.squaredNorm() + log_form_prior(j, c);
    }
    return out;
  }

  Eigen::VectorXd eta_c(design_.n());
  const Eigen::VectorXd base = eta_ - bj * f_cur;
  for (int c = 0; c < forms; ++c) {
    eta_c.noalias() = base + bj * basis(j, c);
    out[c] = loglik_of(eta_c) + log_form_prior(j, c);
  }
  return out;
}

void MixtureSampler::update_ztau(int j) { update_ztau(j, kind_ == OutcomeKind::Continuous); }

void MixtureSampler::update_ztau(int j, bool collapsed) {
  const auto log_w = ztau_log_weights(j, collapsed);
  const int form = rng_.categorical_log(log_w);
  if (form < 0) throw_degenerate(j, log_w);

  const Eigen::VectorXd& f_old = current_basis(j);
  const double b_old = state_.beta[j];
  // retain tau while linear so that it stays an admissible cutoff
  state_.cfg[j] = form == 0 ? TransformConfig{1, state_.cfg[j].tau} : design_.config_at(j, form);
  if (collapsed) {
    update_linear_coefficients();
    return;
  }
  eta_.noalias() += b_old * (basis(j, form) - f_old);
}

bool MixtureSampler::jump_ztau(int j) {
  bool accepted = false;
  switch (kind_) {
    case OutcomeKind::Continuous:
      throw Error(ErrorCode::InvalidArgument, "continuous outcomes use the collapsed form update");
    case OutcomeKind::Binary:
      accepted = jump_logistic(j);
      break;
    case OutcomeKind::Survival:
      accepted = jump_survival(j);
      break;
  }
  ++jump_tries_;
  if (accepted) ++jump_accepts_;
  return accepted;
}

bool MixtureSampler::jump_logistic(int j) {
  using Vec = Eigen::Vector2d;
  using Mat = Eigen::Matrix2d;
  const int forms = design_.config_count(j);
  const int form_cur = design_.config_index(j, state_.cfg[j]);
  const Eigen::VectorXd& f_cur = basis(j, form_cur);
  const Eigen::VectorXd offset = eta_ - state_.beta[j] * f_cur - Eigen::VectorXd::Constant(eta_.size(), state_.alpha);
  const double va = priors_.beta_variance;
  const double vb = prior_variance(j);
  const Eigen::Index n = offset.size();

  auto target = [&](int c) {
    return [&, f = &basis(j, c)](const Vec& th, Vec* grad, Mat* hess) {
      double value = -0.5 * th[0] * th[0] / va - 0.5 * th[1] * th[1] / vb;
      double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double fi = (*f)[i];
        const double e = offset[i] + th[0] + th[1] * fi;
        const double t = std::exp(-std::fabs(e));
        value += y_[i] * e - (std::max(e, 0.0) + std::log1p(t));
        if (grad) {
          const double p = e >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
          const double res = y_[i] - p;
          const double w = p * (1.0 - p);
          g0 += res;
          g1 += res * fi;
          h00 += w;
          h01 += w * fi;
          h11 += w * fi * fi;
        }
      }
      if (grad) {
        *grad << g0 - th[0] / va, g1 - th[1] / vb;
        *hess << -h00 - 1.0 / va, -h01, -h01, -h11 - 1.0 / vb;
      }
      return value;
    };
  };

  std::vector<LaplaceFit<2>> fits;
  std::vector<double> log_w(forms);
  for (int c = 0; c < forms; ++c) {
    fits.push_back(laplace_fit<2>(target(c)));
    log_w[c] = fits[c].log_target + fits[c].log_normaliser() + log_form_prior(j, c);
  }
  const double log_total = log_sum_exp(log_w);
  const int form_new = rng_.categorical_log(log_w);
  if (form_new < 0) throw_degenerate(j, log_w);
  const Vec th_new = fits[form_new].draw(rng_);
  const Vec th_cur(state_.alpha, state_.beta[j]);

  const double log_num = target(form_new)(th_new, nullptr, nullptr) + log_form_prior(j, form_new) +
                         (log_w[form_cur] - log_total) + fits[form_cur].log_density(th_cur);
  const double log_den = target(form_cur)(th_cur, nullptr, nullptr) + log_form_prior(j, form_cur) +
                         (log_w[form_new] - log_total) + fits[form_new].log_density(th_new);
  const double log_ratio = log_num - log_den;
  if (!std::isfinite(log_ratio) || std::log(rng_.uniform()) >= log_ratio) return false;

  state_.cfg[j] = form_new == 0 ? TransformConfig{1, state_.cfg[j].tau} : design_.config_at(j, form_new);
  state_.alpha = th_new[0];
  state_.beta[j] = th_new[1];
  eta_ = offset + th_new[1] * basis(j, form_new);
  eta_.array() += th_new[0];
  return true;
}

bool MixtureSampler::jump_survival(int j) {
  using Vec = Eigen::Matrix<double, 1, 1>;
  using Mat = Eigen::Matrix<double, 1, 1>;
  const int forms = design_.config_count(j);
  const int form_cur = design_.config_index(j, state_.cfg[j]);
  const Eigen::VectorXd offset = eta_ - state_.beta[j] * basis(j, form_cur);
  const double vb = prior_variance(j);
  const int n = design_.n();
  const auto& grid = *grid_;
  const int M = grid.size();
  const auto& d = grid.events_at();
  const auto& prior_inc = grid.prior_increments();
  const double c0 = priors_.c0;
  double event_offset = 0.0;
  for (int i = 0; i < n; ++i) event_offset += events_[i] * offset[i];

  std::vector<double> w(n), wf(n), wff(n);
  // log p(events | beta_j, rest) with the gamma-process increments integrated out, plus the beta_j prior
  auto target = [&](int c) {
    const Eigen::VectorXd& f = basis(j, c);
    return [&, &f = f, event_f = events_.dot(f)](const Vec& th, Vec* grad, Mat* hess) {
      const double b = th[0];
      for (int i = 0; i < n; ++i) {
        w[i] = std::exp(offset[i] + b * f[i]);
        wf[i] = w[i] * f[i];
        wff[i] = wf[i] * f[i];
      }
      const auto r0 = grid.risk_sums(w);
      double value = event_offset + b * event_f - 0.5 * b * b / vb;
      for (int m = 0; m < M; ++m) value -= (c0 * prior_inc[m] + d[m]) * std::log(c0 + r0[m]);
      if (grad) {
        const auto r1 = grid.risk_sums(wf);
        const auto r2 = grid.risk_sums(wff);
        double g = event_f - b / vb;
        double h = -1.0 / vb;
        for (int m = 0; m < M; ++m) {
          const double a = c0 * prior_inc[m] + d[m];
          const double denom = c0 + r0[m];
          const double e1 = r1[m] / denom;
          g -= a * e1;
          h -= a * (r2[m] / denom - e1 * e1);
        }
        (*grad)[0] = g;
        (*hess)(0, 0) = h;
      }
      return value;
    };
  };

  std::vector<LaplaceFit<1>> fits;
  std::vector<double> log_w(forms);
  for (int c = 0; c < forms; ++c) {
    fits.push_back(laplace_fit<1>(target(c)));
    log_w[c] = fits[c].log_target + fits[c].log_normaliser() + log_form_prior(j, c);
  }
  const double log_total = log_sum_exp(log_w);
  const int form_new = rng_.categorical_log(log_w);
  if (form_new < 0) throw_degenerate(j, log_w);
  const Vec th_new = fits[form_new].draw(rng_);
  const Vec th_cur = Vec::Constant(state_.beta[j]);

  const double log_num = target(form_new)(th_new, nullptr, nullptr) + log_form_prior(j, form_new) +
                         (log_w[form_cur] - log_total) + fits[form_cur].log_density(th_cur);
  const double log_den = target(form_cur)(th_cur, nullptr, nullptr) + log_form_prior(j, form_cur) +
                         (log_w[form_new] - log_total) + fits[form_new].log_density(th_new);
  const double log_ratio = log_num - log_den;
  const bool accept = std::isfinite(log_ratio) && std::log(rng_.uniform()) < log_ratio;
  if (accept) {
    state_.cfg[j] = form_new == 0 ? TransformConfig{1, state_.cfg[j].tau} : design_.config_at(j, form_new);
    state_.beta[j] = th_new[0];
    eta_ = offset + th_new[0] * basis(j, form_new);
  }
  // completes the block: increments are drawn from their conditional either way
  update_hazard_increments();
  return accept;
}

}  // namespace ordmix
