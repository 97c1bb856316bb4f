#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ordmix/diagnostics.hpp"
#include "ordmix/ingest.hpp"
#include "ordmix/simulation.hpp"

namespace ordmix {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitConvergence = 3 };

/// Columns: parameter, mean, sd, ci_low, ci_high, selected, p_z1,
/// p_tau_1..p_tau_K, rhat; 6 significant digits.
void write_summary_csv(const PosteriorSummary& summary, int max_level, std::ostream& os);

/// One row per stored draw at full precision: iteration, alpha, sigma2, pz,
/// hazard_total as applicable, then beta_, z_ and tau_ columns per predictor.
void write_draws_csv(const DrawStore& draws, const OrdinalDesign& design, OutcomeKind kind, std::ostream& os);

struct FitResult {
  PosteriorSummary summary;
  ConvergenceReport convergence;
  int exit_code = kExitOk;
};

/// Ingests, samples, and writes summary.csv, draws_chain<c>.csv,
/// convergence.txt and, when predictors were re-coded, recoding.csv into
/// request.out_dir. Exit code 3 when convergence fails or is not assessable.
FitResult run_fit(const FitRequest& request, std::ostream& log);

/// Runs the scenario and writes <name>.csv and <name>_meta.txt into out_dir.
SimReport run_simulate(const ScenarioSpec& spec, const std::string& out_dir, std::ostream& log);

struct VerifyOptions {
  int instances = 10;
  int n = 20;
  int predictors = 2;
  int draws_per_chain = 20000;
  int burn_in = 2000;
  int chains = 2;
  std::uint64_t seed = 20240601;
  double tolerance = 0.02;
};

struct VerifyInstance {
  std::vector<double> exact_p_z1;
  std::vector<double> mcmc_p_z1;
  double max_abs_diff = 0.0;
};

struct VerifyResult {
  std::vector<VerifyInstance> instances;
  double max_abs_diff = 0.0;
  bool passed = false;
};

/// Scenario used for oracle comparison instance i: n subjects, ordinal levels
/// 0..3, moderate mixed signal, residual sd 0.5.
ScenarioSpec verify_scenario(const VerifyOptions& options);

/// Compares sampler P(Z_j = 1) against the exact enumeration on random
/// continuous-outcome instances without penalty.
VerifyResult run_verify(const VerifyOptions& options, std::ostream& log);

/// Maps an exception to the documented exit status.
int exit_code_for(const std::exception& e);

}  // namespace ordmix
