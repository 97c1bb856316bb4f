#include "ordmix/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ordmix/csv.hpp"
#include "ordmix/error.hpp"
#include "ordmix/oracle.hpp"

namespace ordmix {

namespace {

constexpr double kReferenceCensoring = 0.199;
constexpr double kCensoringFlagTolerance = 0.05;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return os;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir + "': " + ec.message());
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::vector<std::string> scalar_fields(const ScalarSummary& s) {
  return {s.name, format_number(s.mean), format_number(s.sd), format_number(s.ci_low), format_number(s.ci_high),
          s.selected ? "1" : "0"};
}

}  // namespace

void write_summary_csv(const PosteriorSummary& summary, int max_level, std::ostream& os) {
  std::vector<std::string> header{"parameter", "mean", "sd", "ci_low", "ci_high", "selected", "p_z1"};
  for (int k = 1; k <= max_level; ++k) header.push_back("p_tau_" + std::to_string(k));
  header.push_back("rhat");
  write_csv_row(os, header);

  auto scalar_row = [&](const ScalarSummary& s) {
    auto fields = scalar_fields(s);
    fields.push_back("NA");
    for (int k = 1; k <= max_level; ++k) fields.push_back("NA");
    fields.push_back(format_optional(s.rhat));
    write_csv_row(os, fields);
  };
  if (summary.alpha) scalar_row(*summary.alpha);
  if (summary.sigma2) scalar_row(*summary.sigma2);
  for (const auto& p : summary.predictors) {
    auto fields = scalar_fields(p.beta);
    fields.push_back(format_number(p.p_z1));
    for (int k = 1; k <= max_level; ++k) fields.push_back(format_number(p.p_tau_at(k)));
    fields.push_back(format_optional(p.beta.rhat));
    write_csv_row(os, fields);
  }
}

void write_draws_csv(const DrawStore& draws, const OrdinalDesign& design, OutcomeKind kind, std::ostream& os) {
  const int J = design.predictors();
  std::vector<std::string> header{"iteration"};
  if (kind != OutcomeKind::Survival) header.push_back("alpha");
  if (kind == OutcomeKind::Continuous) header.push_back("sigma2");
  header.push_back("pz");
  if (kind == OutcomeKind::Survival) header.push_back("hazard_total");
  for (int j = 0; j < J; ++j) header.push_back("beta_" + design.name(j));
  for (int j = 0; j < J; ++j) header.push_back("z_" + design.name(j));
  for (int j = 0; j < J; ++j) header.push_back("tau_" + design.name(j));
  write_csv_row(os, header);

  for (std::size_t d = 0; d < draws.size(); ++d) {
    std::vector<std::string> row{std::to_string(draws.iteration[d])};
    if (kind != OutcomeKind::Survival) row.push_back(format_full(draws.alpha[d]));
    if (kind == OutcomeKind::Continuous) row.push_back(format_full(draws.sigma2[d]));
    row.push_back(format_full(draws.pz[d]));
    if (kind == OutcomeKind::Survival) row.push_back(format_full(draws.hazard_total[d]));
    for (int j = 0; j < J; ++j) row.push_back(format_full(draws.beta_at(d, j)));
    for (int j = 0; j < J; ++j) row.push_back(std::to_string(draws.z_at(d, j)));
    for (int j = 0; j < J; ++j) row.push_back(draws.z_at(d, j) == 0 ? std::to_string(draws.tau_at(d, j)) : "NA");
    write_csv_row(os, row);
  }
}

FitResult run_fit(const FitRequest& request, std::ostream& log) {
  request.priors.validate();
  request.chain.validate();
  const IngestResult data = ingest_csv(request.input, request);
  const OutcomeKind kind = kind_of(data.outcome);
  const auto draws = run_chains(data.design, data.outcome, request.priors, request.chain);

  FitResult result;
  result.summary = summarize(draws, data.design, kind);
  result.convergence = check_convergence(result.summary);

  int max_level = 0;
  for (int j = 0; j < data.design.predictors(); ++j) max_level = std::max(max_level, data.design.max_level(j));

  ensure_directory(request.out_dir);
  const std::filesystem::path dir(request.out_dir);
  {
    auto os = open_output(dir / "summary.csv");
    write_summary_csv(result.summary, max_level, os);
  }
  for (std::size_t c = 0; c < draws.size(); ++c) {
    auto os = open_output(dir / ("draws_chain" + std::to_string(c + 1) + ".csv"));
    write_draws_csv(draws[c], data.design, kind, os);
  }
  {
    auto os = open_output(dir / "convergence.txt");
    os << result.convergence.text();
  }
  if (!data.recodings.empty()) {
    auto os = open_output(dir / "recoding.csv");
    write_recoding_csv(data.recodings, os);
  }

  log << "family " << to_string(kind) << ", " << data.design.n() << " subjects, " << data.design.predictors()
      << " predictors, " << result.summary.chains << " chains, " << result.summary.draws << " draws\n";
  log << std::fixed << std::setprecision(3);
  for (const auto& p : result.summary.predictors) {
    log << "  " << std::left << std::setw(16) << p.beta.name << std::right << " beta " << std::setw(8) << p.beta.mean
        << " [" << p.beta.ci_low << ", " << p.beta.ci_high << "]  P(linear) " << p.p_z1;
    for (std::size_t k = 0; k < p.cutoffs.size(); ++k) log << "  P(tau=" << p.cutoffs[k] << ") " << p.p_tau[k];
    log << '\n';
  }
  log.unsetf(std::ios::fixed);
  log << result.convergence.text();

  if (!result.convergence.assessable || !result.convergence.passed) result.exit_code = kExitConvergence;
  return result;
}

SimReport run_simulate(const ScenarioSpec& spec, const std::string& out_dir, std::ostream& log) {
  const SimReport report = run_replications(spec);
  ensure_directory(out_dir);
  const std::filesystem::path dir(out_dir);
  {
    auto os = open_output(dir / (spec.name + ".csv"));
    write_report_csv(report, os);
  }
  std::ostringstream meta;
  meta << "scenario " << spec.name << '\n'
       << "outcome " << to_string(spec.outcome) << '\n'
       << "replications " << spec.replications << '\n'
       << "seed " << spec.seed << '\n'
       << "iterations " << spec.chain.n_iter << '\n'
       << "burn_in " << spec.chain.burn_in << '\n'
       << "chains " << spec.chain.n_chains << '\n'
       << "rhat_failures " << report.rhat_failures << '\n';
  if (spec.outcome == OutcomeKind::Survival) {
    const bool flagged = std::fabs(report.mean_censoring - kReferenceCensoring) > kCensoringFlagTolerance;
    meta << "censoring_proportion " << format_number(report.mean_censoring) << '\n'
         << "censoring_reference " << kReferenceCensoring << '\n'
         << "censoring_deviation_flag " << (flagged ? "deviates" : "consistent") << '\n';
  }
  {
    auto os = open_output(dir / (spec.name + "_meta.txt"));
    os << meta.str();
  }
  log << format_report(report);
  if (spec.outcome == OutcomeKind::Survival) {
    log << "achieved censoring proportion " << format_number(report.mean_censoring, 3) << " vs reference "
        << kReferenceCensoring
        << (std::fabs(report.mean_censoring - kReferenceCensoring) > kCensoringFlagTolerance ? " (deviation flagged)"
                                                                                              : "")
        << '\n';
  }
  return report;
}

ScenarioSpec verify_scenario(const VerifyOptions& options) {
  if (options.instances < 1 || options.n < 4 || options.predictors < 1)
    throw Error(ErrorCode::InvalidArgument, "verify needs at least one instance, four subjects and one predictor");
  ScenarioSpec s;
  s.name = "verify";
  s.outcome = OutcomeKind::Continuous;
  s.n = options.n;
  s.residual_sd = 0.5;
  s.min_cell = 1;
  s.replications = options.instances;
  s.seed = options.seed;
  for (int j = 0; j < options.predictors; ++j)
    s.truth.push_back(PredictorTruth::parse(0.4, j % 2 == 0 ? "tau2" : "linear"));
  s.chain.n_chains = options.chains;
  s.chain.burn_in = options.burn_in;
  s.chain.n_iter = options.burn_in + options.draws_per_chain;
  s.chain.thin = 1;
  return s;
}

VerifyResult run_verify(const VerifyOptions& options, std::ostream& log) {
  const ScenarioSpec spec = verify_scenario(options);
  VerifyResult result;
  log << std::fixed << std::setprecision(4);
  for (int r = 0; r < options.instances; ++r) {
    const SimDataset data = generate_dataset(spec, r);
    const OrdinalDesign design = OrdinalDesign::from_columns(data.columns, spec.min_cell, {}, spec.max_level());
    const auto exact = enumerate_posterior(design, std::get<ContinuousOutcome>(data.outcome), spec.priors);
    ChainConfig chain = spec.chain;
    chain.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r), 1);
    const auto summary = summarize(run_chains(design, data.outcome, spec.priors, chain), design, spec.outcome);

    VerifyInstance inst;
    inst.exact_p_z1 = exact.p_z1;
    log << "instance " << r << ':';
    for (int j = 0; j < design.predictors(); ++j) {
      const double m = summary.predictors[j].p_z1;
      inst.mcmc_p_z1.push_back(m);
      inst.max_abs_diff = std::max(inst.max_abs_diff, std::fabs(m - exact.p_z1[j]));
      log << "  x" << j + 1 << " exact " << exact.p_z1[j] << " mcmc " << m;
    }
    log << "  max diff " << inst.max_abs_diff << '\n';
    result.max_abs_diff = std::max(result.max_abs_diff, inst.max_abs_diff);
    result.instances.push_back(std::move(inst));
  }
  result.passed = result.max_abs_diff < options.tolerance;
  log << "verify: " << (result.passed ? "pass" : "fail") << " (max |mcmc - exact| = " << result.max_abs_diff
      << ", tolerance " << options.tolerance << ")\n";
  log.unsetf(std::ios::fixed);
  return result;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e))
    return is_validation_error(err->code()) ? kExitValidation : kExitRuntime;
  return kExitRuntime;
}

}  // namespace ordmix
