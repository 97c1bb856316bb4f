#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ordmix/design.hpp"
#include "ordmix/outcome.hpp"
#include "ordmix/priors.hpp"
#include "ordmix/random.hpp"
#include "ordmix/survival_grid.hpp"

namespace ordmix {

/// One state of the Markov chain.
struct MixtureState {
  std::vector<TransformConfig> cfg;
  double alpha = 0.0;
  std::vector<double> beta;
  double sigma2 = 1.0;
  double pz = 0.5;
  std::vector<std::vector<double>> pi;  // pi[j][k] over design.cutoffs(j)
  PenaltyAuxiliaries aux;
  std::vector<double> hazard;  // baseline hazard increments, survival only
};

struct ChainConfig {
  int n_iter = 10000;
  int burn_in = 2000;
  int thin = 1;
  int n_chains = 2;
  std::uint64_t seed = 1;
  double initial_step = 0.5;
  int adapt_window = 50;
  double target_acceptance = 0.44;
  // Joint (form, coefficient) Metropolis-Hastings move for binary and survival outcomes.
  bool joint_form_moves = true;

  void validate() const;
};

/// Post-burn-in, thinned draws of one chain.
struct DrawStore {
  int predictors = 0;
  std::vector<int> iteration;
  std::vector<double> alpha;
  std::vector<double> sigma2;
  std::vector<double> pz;
  std::vector<double> hazard_total;
  std::vector<double> beta;  // draw-major: beta[d * predictors + j]
  std::vector<int> z;
  std::vector<int> tau;

  std::size_t size() const { return iteration.size(); }
  double beta_at(std::size_t d, int j) const { return beta[d * predictors + j]; }
  int z_at(std::size_t d, int j) const { return z[d * predictors + j]; }
  int tau_at(std::size_t d, int j) const { return tau[d * predictors + j]; }
  std::vector<double> beta_series(int j) const;
  void append(int iter, const MixtureState& state);
  friend bool operator==(const DrawStore&, const DrawStore&) = default;
};

/// Starting point: every predictor linear, tau at its smallest cutoff,
/// alpha = beta = 0, sigma^2 = 1, p_z = 0.5, uniform pi, unit auxiliaries and,
/// for survival outcomes, hazard increments equal to the prior increments.
MixtureState init_state(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors);

/*
 * Metropolis-within-Gibbs sampler for one chain.
 *
 * A sweep runs, in order: penalty auxiliaries, the (Z_j, tau_j) update of each
 * predictor, the regression coefficients, sigma^2 or the hazard increments,
 * and finally (p_z, pi). The individual updates are public so that they can be
 * exercised at frozen states.
 */
class MixtureSampler {
 public:
  MixtureSampler(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors,
                 const ChainConfig& chain, std::uint64_t seed);

  const MixtureState& state() const { return state_; }
  void set_state(MixtureState state);
  Rng& rng() { return rng_; }
  OutcomeKind kind() const { return kind_; }
  const std::optional<SurvivalGrid>& grid() const { return grid_; }

  /// One full sweep; Metropolis step sizes adapt while iteration <= burn_in.
  void sweep(int iteration);

  void update_penalty();

  /// Log weights of every form of predictor j (index order of
  /// design.config_at). collapsed = true integrates alpha and every beta out
  /// under their conditional normal priors and is available for continuous
  /// outcomes only; otherwise alpha and beta stay at their current values.
  std::vector<double> ztau_log_weights(int j, bool collapsed) const;

  /// Gibbs draw of (Z_j, tau_j). Continuous outcomes use the collapsed form
  /// and redraw (alpha, beta) from their conjugate conditional afterward.
  void update_ztau(int j);
  void update_ztau(int j, bool collapsed);

  /// Metropolis-Hastings move on (form, coefficient) of predictor j with a
  /// Laplace-approximation proposal per form. Binary: (alpha, beta_j);
  /// survival: beta_j with the hazard increments integrated out, followed
  /// by a fresh draw of the increments. Returns true when accepted.
  bool jump_ztau(int j);

  void update_linear_params();  // (alpha, beta) then sigma^2
  void update_linear_coefficients();
  void update_sigma2();
  void update_logistic_params();
  void update_survival_params();  // beta random walk then hazard increments
  void update_survival_coefficients();
  void update_hazard_increments();
  void update_pz_pi();

  /// Shape and rate of the inverse-gamma conditional of sigma^2.
  std::pair<double, double> sigma2_conditional() const;
  /// Shape and rate of the gamma conditional of hazard increment m.
  std::pair<double, double> hazard_conditional(int m) const;
  /// Beta parameters of the p_z conditional.
  std::pair<double, double> pz_conditional() const;
  /// Dirichlet parameters of the pi_j conditional.
  std::vector<double> pi_conditional(int j) const;

  /// Random-walk bookkeeping; index 0 is alpha, j + 1 is beta_j.
  double step_size(int param) const { return steps_[param]; }
  double acceptance_rate(int param) const;
  double jump_acceptance_rate() const;

  double log_likelihood() const;
  const Eigen::VectorXd& linear_predictor() const { return eta_; }

 private:
  const Eigen::VectorXd& basis(int j, int form) const { return basis_[j][form]; }
  const Eigen::VectorXd& current_basis(int j) const;
  double log_form_prior(int j, int form) const;
  double prior_variance(int j) const;
  double precision_for_lasso() const;
  void refresh_eta();
  void refresh_cumulative_hazard();
  double loglik_of(const Eigen::VectorXd& eta) const;
  void finish_adaptation_window(int iteration);
  void record_move(int param, bool accepted);

  // Gaussian-outcome precision and right-hand side of (alpha, beta) given the
  // current forms, assembled from the cached cross products.
  void linear_system(Eigen::MatrixXd& P, Eigen::VectorXd& b) const;
  int column_of(int j, int form) const { return form_offset_[j] + form; }

  bool jump_logistic(int j);
  bool jump_survival(int j);

  const OrdinalDesign& design_;
  PriorConfig priors_;
  ChainConfig chain_;
  OutcomeKind kind_;
  Rng rng_;
  MixtureState state_;

  Eigen::VectorXd y_;       // continuous or binary response
  Eigen::VectorXd events_;  // survival event indicators
  std::optional<SurvivalGrid> grid_;
  std::vector<std::vector<Eigen::VectorXd>> basis_;
  std::vector<std::vector<double>> basis_sum_;
  std::vector<std::vector<double>> basis_sumsq_;
  std::vector<int> form_offset_;   // column of (j, form 0) in the cross-product cache
  Eigen::MatrixXd cross_;          // [1, every basis]' [1, every basis], continuous only
  Eigen::VectorXd cross_y_;        // [1, every basis]' y, continuous only
  Eigen::VectorXd eta_;
  Eigen::VectorXd cum_hazard_;  // H_i, survival only

  std::vector<double> steps_;
  std::vector<long> window_accepts_;
  std::vector<long> window_tries_;
  std::vector<long> total_accepts_;
  std::vector<long> total_tries_;
  long jump_accepts_ = 0;
  long jump_tries_ = 0;
  int windows_done_ = 0;
};

/// Runs one chain and records post-burn-in draws every `thin` iterations.
/// NumericalError is rethrown with the failing iteration.
DrawStore run_chain(const OrdinalDesign& design, const OutcomeData& outcome, const PriorConfig& priors,
                    const ChainConfig& chain, std::uint64_t seed);

/// Runs chain.n_chains chains, chain c seeded with chain.seed + c. Chains run
/// on separate threads when `parallel` is set; the result is identical either way.
std::vector<DrawStore> run_chains(const OrdinalDesign& design, const OutcomeData& outcome,
                                  const PriorConfig& priors, const ChainConfig& chain, bool parallel = true);

}  // namespace ordmix
