#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordmix/design.hpp"
#include "ordmix/outcome.hpp"
#include "ordmix/sampler.hpp"

namespace ordmix {

/// Gelman-Rubin potential scale reduction sqrt(((n-1)/n W + B/n) / W) over
/// at least two equal-length chains of length >= 2.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

/// Sample quantile by linear interpolation of order statistics (R type 7).
/// `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double p);

struct ScalarSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator; 0 for a single draw
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool selected = false;  // the 95% interval excludes 0
  std::optional<double> rhat;
};

struct PredictorSummary {
  ScalarSummary beta;
  double p_z1 = 0.0;
  std::vector<int> cutoffs;
  std::vector<double> p_tau;  // P(tau = cutoffs[k], Z = 0)

  /// P(tau = level, Z = 0); 0 when level is not an admissible cutoff.
  double p_tau_at(int level) const;
};

struct PosteriorSummary {
  OutcomeKind kind = OutcomeKind::Continuous;
  std::size_t draws = 0;
  int chains = 0;
  std::optional<ScalarSummary> alpha;   // absent for survival outcomes
  std::optional<ScalarSummary> sigma2;  // continuous outcomes only
  std::vector<PredictorSummary> predictors;
};

/// Summary of a scalar sample pooled over chains.
ScalarSummary summarize_scalar(std::string name, std::span<const double> draws);

/// Pools the chains. R-hat is attached to alpha, beta_j and sigma^2 when at
/// least two chains of equal length >= 2 are present.
PosteriorSummary summarize(const std::vector<DrawStore>& chains, const OrdinalDesign& design, OutcomeKind kind);

struct ConvergenceReport {
  bool assessable = false;
  bool passed = false;
  double threshold = 1.1;
  std::vector<std::pair<std::string, double>> offenders;
  std::vector<std::pair<std::string, double>> rhats;

  std::string text() const;
};

/// Passes when every available R-hat is below the threshold. A summary
/// without R-hat values (single chain) is reported as not assessable.
ConvergenceReport check_convergence(const PosteriorSummary& summary, double threshold = 1.1);

}  // namespace ordmix
