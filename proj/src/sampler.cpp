#include "ordmix/sampler.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <exception>
#include <thread>

#include "ordmix/error.hpp"

namespace ordmix {

void ChainConfig::validate() const {
  if (n_iter < 1) throw Error(ErrorCode::InvalidArgument, "n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) throw Error(ErrorCode::InvalidArgument, "burn_in must be in [0, n_iter)");
  if (thin < 1) throw Error(ErrorCode::InvalidArgument, "thin must be >= 1");
  if (n_chains < 1) throw Error(ErrorCode::InvalidArgument, "n_chains must be >= 1");
  if (!(initial_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial_step must be positive");
  if (adapt_window < 1) throw Error(ErrorCode::InvalidArgument, "adapt_window must be >= 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw Error(ErrorCode::InvalidArgument, "target_acceptance must be in (0, 1)");
}

std::vector<double> DrawStore::beta_series(int j) const {
  std::vector<double> out(size());
  for (std::size_t d = 0; d < size(); ++d) out[d] = beta_at(d, j);
  return out;
}

void DrawStore::append(int iter, const MixtureState& state) {
  iteration.push_back(iter);
  alpha.push_back(state.alpha);
  sigma2.push_back(state.sigma2);
  pz.push_back(state.pz);
  double total = 0.0;
  for (double h : state.hazard) total += h;
  hazard_total.push_back(total);
  beta.insert(beta.end(), state.beta.begin(), state.beta.end());
  for (const auto& c : state.cfg) {
    z.push_back(c.z);
    tau.push_back(c.tau);
  }
}

MixtureState init_state(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors) {
  const int J = design.predictors();
  MixtureState s;
  s.cfg.resize(J);
  s.pi.resize(J);
  for (int j = 0; j < J; ++j) {
    s.cfg[j] = TransformConfig{1, design.cutoffs(j).front()};
    const auto K = design.cutoffs(j).size();
    s.pi[j].assign(K, 1.0 / static_cast<double>(K));
  }
  s.alpha = 0.0;
  s.beta.assign(J, 0.0);
  s.sigma2 = 1.0;
  s.pz = 0.5;
  s.aux = PenaltyAuxiliaries::initial(J);
  if (const auto* surv = std::get_if<SurvivalOutcome>(&outcome)) {
    s.hazard = SurvivalGrid(*surv, priors.r).prior_increments();
  }
  return s;
}

MixtureSampler::MixtureSampler(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors,
                               const ChainConfig& chain, std::uint64_t seed)
    : design_(design), priors_(priors), chain_(chain), kind_(kind_of(outcome)), rng_(seed) {
  priors_.validate();
  chain_.validate();
  validate_outcome(outcome, design.n());
  const int n = design.n();
  const int J = design.predictors();

  if (const auto* c = std::get_if<ContinuousOutcome>(&outcome)) {
    y_ = Eigen::Map<const Eigen::VectorXd>(c->y.data(), n);
  } else if (const auto* b = std::get_if<BinaryOutcome>(&outcome)) {
    y_.resize(n);
    for (int i = 0; i < n; ++i) y_[i] = b->y[i];
  } else {
    const auto& s = std::get<SurvivalOutcome>(outcome);
    grid_.emplace(s, priors_.r);
    events_.resize(n);
    for (int i = 0; i < n; ++i) events_[i] = s.event[i];
  }

  basis_.resize(J);
  basis_sum_.resize(J);
  basis_sumsq_.resize(J);
  for (int j = 0; j < J; ++j) {
    for (int c = 0; c < design.config_count(j); ++c) {
      const auto f = transform_predictor(design, j, design.config_at(j, c));
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(f.data(), n);
      basis_sum_[j].push_back(v.sum());
      basis_sumsq_[j].push_back(v.squaredNorm());
      basis_[j].push_back(std::move(v));
    }
  }

  form_offset_.resize(J);
  int columns = 1;
  for (int j = 0; j < J; ++j) {
    form_offset_[j] = columns;
    columns += design.config_count(j);
  }
  if (kind_ == OutcomeKind::Continuous) {
    Eigen::MatrixXd all(n, columns);
    all.col(0).setOnes();
    for (int j = 0; j < J; ++j) {
      for (int c = 0; c < design.config_count(j); ++c) all.col(column_of(j, c)) = basis_[j][c];
    }
    cross_ = all.transpose() * all;
    cross_y_ = all.transpose() * y_;
  }

  steps_.assign(J + 1, chain_.initial_step);
  window_accepts_.assign(J + 1, 0);
  window_tries_.assign(J + 1, 0);
  total_accepts_.assign(J + 1, 0);
  total_tries_.assign(J + 1, 0);

  set_state(init_state(design, outcome, priors_));
}

void MixtureSampler::set_state(MixtureState state) {
  const int J = design_.predictors();
  if (static_cast<int>(state.cfg.size()) != J || static_cast<int>(state.beta.size()) != J ||
      static_cast<int>(state.pi.size()) != J)
    throw Error(ErrorCode::DimensionMismatch, "state does not match the design");
  for (int j = 0; j < J; ++j) {
    if (!design_.admissible(j, state.cfg[j]))
      throw Error(ErrorCode::InvalidArgument, "state has an inadmissible form for " + design_.name(j));
    if (state.pi[j].size() != design_.cutoffs(j).size())
      throw Error(ErrorCode::DimensionMismatch, "pi does not match the cutoffs of " + design_.name(j));
  }
  if (kind_ == OutcomeKind::Survival) {
    if (static_cast<int>(state.hazard.size()) != grid_->size())
      throw Error(ErrorCode::DimensionMismatch, "hazard increments do not match the survival grid");
    state.alpha = 0.0;
  }
  if (state.aux.local_scale.size() != static_cast<std::size_t>(J)) state.aux = PenaltyAuxiliaries::initial(J);
  state_ = std::move(state);
  if (kind_ == OutcomeKind::Continuous && priors_.penalty == PenaltyKind::Lasso) {
    state_.aux.precision = 1.0 / state_.sigma2;
  }
  refresh_eta();
  refresh_cumulative_hazard();
}

const Eigen::VectorXd& MixtureSampler::current_basis(int j) const {
  return basis_[j][design_.config_index(j, state_.cfg[j])];
}

void MixtureSampler::linear_system(Eigen::MatrixXd& P, Eigen::VectorXd& b) const {
  const int J = design_.predictors();
  std::vector<int> cols(J + 1, 0);
  for (int j = 0; j < J; ++j) cols[j + 1] = column_of(j, design_.config_index(j, state_.cfg[j]));
  const double s2 = state_.sigma2;
  P.resize(J + 1, J + 1);
  b.resize(J + 1);
  for (int r = 0; r <= J; ++r) {
    b[r] = cross_y_[cols[r]] / s2;
    for (int c = 0; c <= J; ++c) P(r, c) = cross_(cols[r], cols[c]) / s2;
  }
  P(0, 0) += 1.0 / priors_.beta_variance;
  for (int j = 0; j < J; ++j) P(j + 1, j + 1) += 1.0 / prior_variance(j);
}

double MixtureSampler::log_form_prior(int j, int form) const {
  if (form == 0) return std::log(state_.pz);
  return std::log1p(-state_.pz) + std::log(state_.pi[j][form - 1]);
}

double MixtureSampler::prior_variance(int j) const { return beta_prior_variance(j, state_.aux, priors_); }

double MixtureSampler::precision_for_lasso() const {
  return kind_ == OutcomeKind::Continuous ? 1.0 / state_.sigma2 : state_.aux.precision;
}

void MixtureSampler::refresh_eta() {
  eta_ = Eigen::VectorXd::Constant(design_.n(), state_.alpha);
  for (int j = 0; j < design_.predictors(); ++j) {
    if (state_.beta[j] != 0.0) eta_.noalias() += state_.beta[j] * current_basis(j);
  }
}

void MixtureSampler::refresh_cumulative_hazard() {
  if (kind_ != OutcomeKind::Survival) return;
  const auto h = grid_->cumulative_hazard(state_.hazard);
  cum_hazard_ = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
}

double MixtureSampler::loglik_of(const Eigen::VectorXd& eta) const {
  switch (kind_) {
    case OutcomeKind::Continuous:
      return -0.5 * (y_ - eta).squaredNorm() / state_.sigma2 -
             0.5 * static_cast<double>(design_.n()) * std::log(2.0 * std::numbers::pi * state_.sigma2);
    case OutcomeKind::Binary: {
      double ll = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y_[i] * e - softplus;
      }
      return ll;
    }
    case OutcomeKind::Survival: {
      double ll = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += events_[i] * eta[i] - std::exp(eta[i]) * cum_hazard_[i];
        const int m = grid_->event_index(static_cast<int>(i));
        if (m >= 0) ll += std::log(state_.hazard[m]);
      }
      return ll;
    }
  }
  return 0.0;
}

double MixtureSampler::log_likelihood() const { return loglik_of(eta_); }

void MixtureSampler::update_penalty() {
  switch (priors_.penalty) {
    case PenaltyKind::None:
      return;
    case PenaltyKind::Lasso:
      if (kind_ != OutcomeKind::Continuous) update_lasso_precision(state_.aux, state_.beta, priors_, rng_);
      update_lasso_auxiliaries(state_.aux, state_.beta, priors_, precision_for_lasso(), rng_);
      return;
    case PenaltyKind::Horseshoe:
      update_horseshoe_auxiliaries(state_.aux, state_.beta, priors_, rng_);
      return;
  }
}

std::pair<double, double> MixtureSampler::pz_conditional() const {
  double ones = 0.0;
  for (const auto& c : state_.cfg) ones += c.z;
  const double zeros = static_cast<double>(state_.cfg.size()) - ones;
  return {priors_.pz_a + ones, priors_.pz_b + zeros};
}

std::vector<double> MixtureSampler::pi_conditional(int j) const {
  const auto& cuts = design_.cutoffs(j);
  std::vector<double> alpha(cuts.size(), priors_.dirichlet_weight);
  if (!state_.cfg[j].is_linear()) {
    const int form = design_.config_index(j, state_.cfg[j]);
    alpha[form - 1] += 1.0;
  }
  return alpha;
}

void MixtureSampler::update_pz_pi() {
  const auto [a, b] = pz_conditional();
  state_.pz = std::clamp(rng_.beta(a, b), DBL_MIN, 1.0 - DBL_EPSILON);
  for (int j = 0; j < design_.predictors(); ++j) {
    const auto shape = pi_conditional(j);
    auto& pi = state_.pi[j];
    double total = 0.0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      pi[k] = std::max(rng_.gamma(shape[k], 1.0), DBL_MIN);
      total += pi[k];
    }
    for (double& p : pi) p /= total;
  }
}

void MixtureSampler::record_move(int param, bool accepted) {
  ++window_tries_[param];
  ++total_tries_[param];
  if (accepted) {
    ++window_accepts_[param];
    ++total_accepts_[param];
  }
}

double MixtureSampler::acceptance_rate(int param) const {
  return total_tries_[param] > 0 ? static_cast<double>(total_accepts_[param]) / total_tries_[param] : 0.0;
}

double MixtureSampler::jump_acceptance_rate() const {
  return jump_tries_ > 0 ? static_cast<double>(jump_accepts_) / jump_tries_ : 0.0;
}

// Robbins-Monro on the log step size, one gain per completed window.
void MixtureSampler::finish_adaptation_window(int iteration) {
  if (iteration % chain_.adapt_window != 0) return;
  ++windows_done_;
  const double gain = 1.0 / std::sqrt(static_cast<double>(windows_done_));
  for (std::size_t p = 0; p < steps_.size(); ++p) {
    if (window_tries_[p] == 0) continue;
    const double rate = static_cast<double>(window_accepts_[p]) / window_tries_[p];
    steps_[p] = std::clamp(steps_[p] * std::exp(gain * (rate - chain_.target_acceptance) * 2.0), 1e-4, 50.0);
    window_accepts_[p] = 0;
    window_tries_[p] = 0;
  }
}

void MixtureSampler::sweep(int iteration) {
  const bool adapting = iteration <= chain_.burn_in;
  if (iteration == chain_.burn_in + 1) {
    // statistics reported after burn-in cover the frozen-step phase only
    std::fill(total_accepts_.begin(), total_accepts_.end(), 0);
    std::fill(total_tries_.begin(), total_tries_.end(), 0);
    jump_accepts_ = jump_tries_ = 0;
  }
  refresh_eta();
  update_penalty();
  for (int j = 0; j < design_.predictors(); ++j) {
    update_ztau(j);
    if (kind_ != OutcomeKind::Continuous && chain_.joint_form_moves) jump_ztau(j);
  }
  switch (kind_) {
    case OutcomeKind::Continuous:
      update_linear_params();
      break;
    case OutcomeKind::Binary:
      update_logistic_params();
      break;
    case OutcomeKind::Survival:
      update_survival_params();
      break;
  }
  update_pz_pi();
  if (adapting) finish_adaptation_window(iteration);
}

DrawStore run_chain(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors,
                    const ChainConfig& chain, std::uint64_t seed) {
  MixtureSampler sampler(design, outcome, priors, chain, seed);
  DrawStore draws;
  draws.predictors = design.predictors();
  for (int it = 1; it <= chain.n_iter; ++it) {
    try {
      sampler.sweep(it);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NumericalError)
        throw Error(ErrorCode::NumericalError, "iteration " + std::to_string(it) + ": " + e.what());
      throw;
    }
    if (it > chain.burn_in && (it - chain.burn_in) % chain.thin == 0) draws.append(it, sampler.state());
  }
  return draws;
}

std::vector<DrawStore> run_chains(const OrdinalDesign& design, const OutcomeData& outcome,
                                  const PriorConfig& priors, const ChainConfig& chain, bool parallel) {
  chain.validate();
  std::vector<DrawStore> out(chain.n_chains);
  std::vector<std::exception_ptr> errors(chain.n_chains);
  auto work = [&](int c) {
    try {
      out[c] = run_chain(design, outcome, priors, chain, chain.seed + static_cast<std::uint64_t>(c));
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  if (parallel && chain.n_chains > 1 && cores > 1) {
    std::vector<std::thread> threads;
    for (int c = 0; c < chain.n_chains; ++c) threads.emplace_back(work, c);
    for (auto& t : threads) t.join();
  } else {
    for (int c = 0; c < chain.n_chains; ++c) work(c);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace ordmix
