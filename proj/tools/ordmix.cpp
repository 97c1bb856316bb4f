// ordmix: fit, simulate, verify and generate for the ordinal-predictor mixture model.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ordmix/commands.hpp"
#include "ordmix/config_file.hpp"
#include "ordmix/error.hpp"

namespace {

using namespace ordmix;

struct FitOptions {
  std::string config;
  std::string input;
  std::string outcome;
  std::string time;
  std::string event;
  std::vector<std::string> predictors;
  std::string family = "auto";
  std::string penalty;
  double lambda = 0.0;
  int chains = 0;
  int iters = 0;
  int burnin = 0;
  int thin = 0;
  unsigned long long seed = 0;
  int min_cell = 0;
  bool full_draws = false;
  std::string out = ".";
};

struct SimulateOptions {
  std::string scenario;
  int replications = 0;
  unsigned long long seed = 0;
  int iters = 0;
  int burnin = 0;
  std::string out = ".";
};

struct GenerateOptions {
  std::string scenario;
  int replication = 0;
  unsigned long long seed = 0;
  std::string out;
};

bool given(const CLI::App* app, const std::string& name) { return app->count(name) > 0; }

void warn_unused(const ConfigFile& cfg, const std::vector<std::string>& also_allowed = {}) {
  for (const auto& key : cfg.unused_keys()) {
    if (key == "schema_version") continue;
    if (std::find(also_allowed.begin(), also_allowed.end(), key) != also_allowed.end()) continue;
    std::cerr << "warning: unknown config key '" << key << "'\n";
  }
}

int cmd_fit(const CLI::App* app, const FitOptions& o) {
  FitRequest req;
  req.chain.thin = 5;
  if (!o.config.empty()) {
    const ConfigFile cfg = ConfigFile::load(o.config);
    req.priors = priors_from_config(cfg, req.priors);
    req.chain = chain_from_config(cfg, req.chain);
    req.min_cell = static_cast<int>(cfg.get_int("min_cell", req.min_cell));
    req.family = cfg.get_string("family", req.family);
    warn_unused(cfg);
  }
  req.input = o.input;
  req.outcome_column = o.outcome;
  req.time_column = o.time;
  req.event_column = o.event;
  req.predictors = o.predictors;
  req.out_dir = o.out;
  if (given(app, "--family")) req.family = o.family;
  if (given(app, "--penalty")) req.priors.penalty = parse_penalty(o.penalty);
  if (given(app, "--lambda")) req.priors.lambda = o.lambda;
  if (given(app, "--chains")) req.chain.n_chains = o.chains;
  if (given(app, "--iters")) req.chain.n_iter = o.iters;
  if (given(app, "--burnin")) req.chain.burn_in = o.burnin;
  if (given(app, "--thin")) req.chain.thin = o.thin;
  if (given(app, "--seed")) req.chain.seed = o.seed;
  if (given(app, "--min-cell")) req.min_cell = o.min_cell;
  if (o.full_draws) req.chain.thin = 1;
  return run_fit(req, std::cout).exit_code;
}

ScenarioSpec load_scenario(const std::string& path) {
  const ConfigFile cfg = ConfigFile::load(path);
  ScenarioSpec spec = scenario_from_config(cfg);
  warn_unused(cfg);
  return spec;
}

int cmd_simulate(const CLI::App* app, const SimulateOptions& o) {
  ScenarioSpec spec = load_scenario(o.scenario);
  if (given(app, "--replications")) spec.replications = o.replications;
  if (given(app, "--seed")) spec.seed = spec.chain.seed = o.seed;
  if (given(app, "--iters")) spec.chain.n_iter = o.iters;
  if (given(app, "--burnin")) spec.chain.burn_in = o.burnin;
  spec.validate();
  run_simulate(spec, o.out, std::cout);
  return kExitOk;
}

int cmd_verify(const VerifyOptions& o) { return run_verify(o, std::cout).passed ? kExitOk : kExitRuntime; }

int cmd_generate(const CLI::App* app, const GenerateOptions& o) {
  ScenarioSpec spec = load_scenario(o.scenario);
  if (given(app, "--seed")) spec.seed = o.seed;
  spec.validate();
  if (o.replication < 0) throw Error(ErrorCode::InvalidArgument, "replication must be >= 0");
  const SimDataset data = generate_dataset(spec, o.replication);
  if (o.out.empty() || o.out == "-") {
    write_dataset_csv(data, std::cout);
    return kExitOk;
  }
  std::ofstream os(o.out, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write '" + o.out + "'");
  write_dataset_csv(data, os);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture model for ordinal predictors: linear or dichotomized effects"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a CSV file");
  fit_cmd->add_option("--config", fit.config, "key = value file with prior and chain settings")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--input", fit.input, "input CSV with a header row")->required()->check(CLI::ExistingFile);
  auto* outcome_opt = fit_cmd->add_option("--outcome", fit.outcome, "continuous or binary outcome column");
  auto* time_opt = fit_cmd->add_option("--time", fit.time, "survival time column");
  auto* event_opt = fit_cmd->add_option("--event", fit.event, "event indicator column (1 = event)");
  time_opt->needs(event_opt);
  event_opt->needs(time_opt);
  outcome_opt->excludes(time_opt)->excludes(event_opt);
  fit_cmd->add_option("--predictors", fit.predictors, "predictor columns (default: every other column)")
      ->delimiter(',');
  fit_cmd->add_option("--family", fit.family, "auto, continuous, binary or survival")
      ->check(CLI::IsMember({"auto", "continuous", "binary", "survival"}));
  fit_cmd->add_option("--penalty", fit.penalty, "none, lasso or horseshoe")
      ->check(CLI::IsMember({"none", "lasso", "horseshoe"}));
  fit_cmd->add_option("--lambda", fit.lambda, "shrinkage parameter");
  fit_cmd->add_option("--chains", fit.chains, "number of chains (default 2)");
  fit_cmd->add_option("--iters", fit.iters, "iterations per chain including burn-in (default 10000)");
  fit_cmd->add_option("--burnin", fit.burnin, "burn-in iterations (default 2000)");
  fit_cmd->add_option("--thin", fit.thin, "keep every thin-th draw (default 5)");
  fit_cmd->add_option("--seed", fit.seed, "seed of chain 1; chain c uses seed + c - 1");
  fit_cmd->add_option("--min-cell", fit.min_cell, "minimum subjects on each side of a cutoff (default 5)");
  fit_cmd->add_flag("--full-draws", fit.full_draws, "write every post-burn-in draw (thin = 1)");
  fit_cmd->add_option("--out", fit.out, "output directory");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation scenario");
  sim_cmd->add_option("--scenario", sim.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--replications", sim.replications, "override the number of replications");
  sim_cmd->add_option("--seed", sim.seed, "override the master seed");
  sim_cmd->add_option("--iters", sim.iters, "override iterations per chain");
  sim_cmd->add_option("--burnin", sim.burnin, "override burn-in");
  sim_cmd->add_option("--out", sim.out, "output directory");

  VerifyOptions ver;
  auto* ver_cmd = app.add_subcommand("verify", "Compare the sampler with exact enumeration on small instances");
  ver_cmd->add_option("--instances", ver.instances, "number of random instances");
  ver_cmd->add_option("--n", ver.n, "subjects per instance");
  ver_cmd->add_option("--predictors", ver.predictors, "predictors per instance");
  ver_cmd->add_option("--draws", ver.draws_per_chain, "post-burn-in draws per chain");
  ver_cmd->add_option("--burnin", ver.burn_in, "burn-in iterations");
  ver_cmd->add_option("--seed", ver.seed, "master seed");
  ver_cmd->add_option("--tolerance", ver.tolerance, "largest accepted |mcmc - exact| for P(linear)");

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write one simulated dataset of a scenario as CSV");
  gen_cmd->add_option("--scenario", gen.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--replication", gen.replication, "replication index (default 0)");
  gen_cmd->add_option("--seed", gen.seed, "override the master seed");
  gen_cmd->add_option("--out", gen.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fit_cmd) {
      if (fit.outcome.empty() && fit.time.empty())
        throw Error(ErrorCode::InvalidArgument, "give --outcome, or --time and --event");
      return cmd_fit(fit_cmd, fit);
    }
    if (*sim_cmd) return cmd_simulate(sim_cmd, sim);
    if (*ver_cmd) return cmd_verify(ver);
    if (*gen_cmd) return cmd_generate(gen_cmd, gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}
