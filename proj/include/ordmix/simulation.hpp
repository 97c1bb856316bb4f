#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordmix/design.hpp"
#include "ordmix/diagnostics.hpp"
#include "ordmix/outcome.hpp"
#include "ordmix/priors.hpp"
#include "ordmix/random.hpp"
#include "ordmix/sampler.hpp"

namespace ordmix {

enum class TruthForm { Linear, Cutoff, Null };

/// Data-generating form and coefficient of one predictor.
struct PredictorTruth {
  double beta = 0.0;
  TruthForm form = TruthForm::Null;
  int cutoff = 0;  // used when form == Cutoff

  /// "linear", the cutoff level, or "null".
  std::string label() const;
  /// Parses "linear", "null", "tauK" or "K".
  static PredictorTruth parse(double beta, const std::string& form);
};

struct ScenarioSpec {
  std::string name = "scenario";
  OutcomeKind outcome = OutcomeKind::Continuous;
  int n = 35;
  double rho = 0.0;
  std::vector<double> percentiles{30.0, 60.0, 85.0};
  std::vector<PredictorTruth> truth;
  double intercept = 0.0;  // true alpha, added to every linear predictor
  double residual_sd = 0.1;
  double baseline_hazard = 1.0;
  double censoring_rate = 0.1;
  int replications = 50;
  int min_cell = 1;
  std::uint64_t seed = 1;
  PriorConfig priors;
  ChainConfig chain;

  int max_level() const { return static_cast<int>(percentiles.size()); }
  void validate() const;
};

/// Subject-by-predictor levels: J equicorrelated standard normals per subject
/// cut at the standard-normal quantiles of `percentiles`. Returns columns.
std::vector<std::vector<int>> gen_ordinal_predictors(int n, int J, double rho, std::span<const double> percentiles,
                                                     Rng& rng);

/// Outcome from the true forms and intercept: continuous N(eta, sd^2),
/// Bernoulli(logistic(eta)), or T ~ Exp(h0 e^eta) censored by C ~ Exp(rate).
OutcomeData gen_outcome(const std::vector<std::vector<int>>& columns, const ScenarioSpec& spec, Rng& rng);

struct SimDataset {
  std::vector<std::vector<int>> columns;
  OutcomeData outcome;
};

/// Dataset of replication r, generated from derive_seed(spec.seed, r, 0).
SimDataset generate_dataset(const ScenarioSpec& spec, int replication);

/// Writes a dataset as CSV with columns x1..xJ followed by y, or time and event.
void write_dataset_csv(const SimDataset& data, std::ostream& os);

/// Fraction of censored subjects; 0 for other outcome kinds.
double censoring_proportion(const OutcomeData& outcome);

struct SimRow {
  PredictorTruth truth;
  double beta_hat = 0.0;
  double sd = 0.0;
  double mse = 0.0;
  double cp = 0.0;
  double selection = 0.0;
  double p_z1 = 0.0;
  std::vector<double> p_tau;  // levels 1..max_level

  /// Mean posterior probability of the data-generating form; absent for null truths.
  std::optional<double> true_state_probability() const;
};

struct SimReport {
  std::string scenario;
  OutcomeKind outcome = OutcomeKind::Continuous;
  int replications = 0;
  int max_level = 0;
  std::vector<SimRow> rows;
  double mean_censoring = 0.0;
  int rhat_failures = 0;  // replications whose convergence check failed
  std::vector<PosteriorSummary> summaries;  // one per replication, in order
};

/// Runs every replication: chains of replication r start from
/// derive_seed(spec.seed, r, 1) + c. Replications run concurrently when
/// `parallel` is set; the report does not depend on it.
SimReport run_replications(const ScenarioSpec& spec, bool parallel = true);

/// CSV with columns beta_true, beta_hat, sd, mse, cp, selection_prop,
/// cutoff_true, p_z1, p_tau_1, ... p_tau_K.
void write_report_csv(const SimReport& report, std::ostream& os);

/// Aligned plain-text table of the report.
std::string format_report(const SimReport& report);

}  // namespace ordmix
