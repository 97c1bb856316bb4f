#include "ordmix/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "ordmix/csv.hpp"
#include "ordmix/error.hpp"

namespace ordmix {

std::string PredictorTruth::label() const {
  switch (form) {
    case TruthForm::Linear: return "linear";
    case TruthForm::Cutoff: return std::to_string(cutoff);
    case TruthForm::Null: return "null";
  }
  return "null";
}

PredictorTruth PredictorTruth::parse(double beta, const std::string& form) {
  PredictorTruth t;
  t.beta = beta;
  if (form == "linear") {
    t.form = TruthForm::Linear;
  } else if (form == "null") {
    t.form = TruthForm::Null;
  } else {
    std::string digits = form.rfind("tau", 0) == 0 ? form.substr(3) : form;
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "unknown truth form '" + form + "'");
    t.form = TruthForm::Cutoff;
    t.cutoff = std::stoi(digits);
  }
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "true coefficient must be finite");
  return t;
}

void ScenarioSpec::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "scenario n must be >= 2");
  if (truth.empty()) throw Error(ErrorCode::InvalidArgument, "scenario has no predictors");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidCorrelation, "rho must lie in [0, 1)");
  if (percentiles.empty()) throw Error(ErrorCode::InvalidArgument, "at least one percentile cut is required");
  for (std::size_t k = 0; k < percentiles.size(); ++k) {
    if (!(percentiles[k] > 0.0 && percentiles[k] < 100.0) || (k && !(percentiles[k] > percentiles[k - 1])))
      throw Error(ErrorCode::InvalidArgument, "percentiles must be strictly increasing in (0, 100)");
  }
  for (const auto& t : truth) {
    if (!std::isfinite(t.beta)) throw Error(ErrorCode::InvalidArgument, "true coefficient must be finite");
    if (t.form == TruthForm::Cutoff && (t.cutoff < 1 || t.cutoff > max_level()))
      throw Error(ErrorCode::InvalidArgument, "true cutoff outside 1.." + std::to_string(max_level()));
  }
  if (!std::isfinite(intercept)) throw Error(ErrorCode::InvalidArgument, "intercept must be finite");
  if (!(residual_sd > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual_sd must be positive");
  if (!(baseline_hazard > 0.0)) throw Error(ErrorCode::InvalidArgument, "baseline_hazard must be positive");
  if (!(censoring_rate >= 0.0)) throw Error(ErrorCode::InvalidArgument, "censoring_rate must be nonnegative");
  if (replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (min_cell < 1) throw Error(ErrorCode::InvalidArgument, "min_cell must be >= 1");
  priors.validate();
  chain.validate();
}

std::vector<std::vector<int>> gen_ordinal_predictors(int n, int J, double rho, std::span<const double> percentiles,
                                                     Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw Error(ErrorCode::InvalidCorrelation, "equicorrelation must lie in [0, 1) to be positive definite");
  if (n < 1 || J < 1) throw Error(ErrorCode::InvalidArgument, "n and J must be positive");
  const boost::math::normal_distribution<double> std_normal;
  std::vector<double> cuts;
  for (double p : percentiles) cuts.push_back(boost::math::quantile(std_normal, p / 100.0));
  const double shared = std::sqrt(rho);
  const double own = std::sqrt(1.0 - rho);
  std::vector<std::vector<int>> cols(J, std::vector<int>(n));
  for (int i = 0; i < n; ++i) {
    const double w = rng.normal();
    for (int j = 0; j < J; ++j) {
      const double z = shared * w + own * rng.normal();
      cols[j][i] = static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), z) - cuts.begin());
    }
  }
  return cols;
}

namespace {

std::vector<double> true_linear_predictor(const std::vector<std::vector<int>>& columns, const ScenarioSpec& spec) {
  const int n = static_cast<int>(columns.front().size());
  std::vector<double> eta(n, spec.intercept);
  for (std::size_t j = 0; j < spec.truth.size(); ++j) {
    const auto& t = spec.truth[j];
    if (t.form == TruthForm::Null || t.beta == 0.0) continue;
    const auto& x = columns[j];
    if (t.form == TruthForm::Linear) {
      const double scale = 2.0 * column_sd(x);
      for (int i = 0; i < n; ++i) eta[i] += t.beta * x[i] / scale;
    } else {
      for (int i = 0; i < n; ++i) eta[i] += x[i] < t.cutoff ? t.beta : 0.0;
    }
  }
  return eta;
}

}  // namespace

OutcomeData gen_outcome(const std::vector<std::vector<int>>& columns, const ScenarioSpec& spec, Rng& rng) {
  if (columns.size() != spec.truth.size())
    throw Error(ErrorCode::DimensionMismatch, "one truth entry per predictor column is required");
  const auto eta = true_linear_predictor(columns, spec);
  const std::size_t n = eta.size();
  switch (spec.outcome) {
    case OutcomeKind::Continuous: {
      ContinuousOutcome out;
      for (std::size_t i = 0; i < n; ++i) out.y.push_back(rng.normal(eta[i], spec.residual_sd));
      return out;
    }
    case OutcomeKind::Binary: {
      BinaryOutcome out;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-eta[i]));
        out.y.push_back(rng.uniform() < p ? 1 : 0);
      }
      return out;
    }
    case OutcomeKind::Survival: {
      SurvivalOutcome out;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.exponential(spec.baseline_hazard * std::exp(eta[i]));
        const double c = spec.censoring_rate > 0.0 ? rng.exponential(spec.censoring_rate) : INFINITY;
        out.time.push_back(std::min(t, c));
        out.event.push_back(t <= c ? 1 : 0);
      }
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown outcome kind");
}

SimDataset generate_dataset(const ScenarioSpec& spec, int replication) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(replication), 0));
  SimDataset data;
  data.columns = gen_ordinal_predictors(spec.n, static_cast<int>(spec.truth.size()), spec.rho, spec.percentiles, rng);
  data.outcome = gen_outcome(data.columns, spec, rng);
  return data;
}

void write_dataset_csv(const SimDataset& data, std::ostream& os) {
  const std::size_t J = data.columns.size();
  const std::size_t n = J ? data.columns.front().size() : 0;
  std::vector<std::string> header;
  for (std::size_t j = 0; j < J; ++j) header.push_back("x" + std::to_string(j + 1));
  const OutcomeKind kind = kind_of(data.outcome);
  if (kind == OutcomeKind::Survival) {
    header.push_back("time");
    header.push_back("event");
  } else {
    header.push_back("y");
  }
  write_csv_row(os, header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < J; ++j) row.push_back(std::to_string(data.columns[j][i]));
    if (const auto* c = std::get_if<ContinuousOutcome>(&data.outcome)) {
      row.push_back(format_full(c->y[i]));
    } else if (const auto* b = std::get_if<BinaryOutcome>(&data.outcome)) {
      row.push_back(std::to_string(b->y[i]));
    } else {
      const auto& s = std::get<SurvivalOutcome>(data.outcome);
      row.push_back(format_full(s.time[i]));
      row.push_back(std::to_string(s.event[i]));
    }
    write_csv_row(os, row);
  }
}

double censoring_proportion(const OutcomeData& outcome) {
  const auto* s = std::get_if<SurvivalOutcome>(&outcome);
  if (!s || s->event.empty()) return 0.0;
  double censored = 0.0;
  for (int e : s->event) censored += e == 0 ? 1.0 : 0.0;
  return censored / static_cast<double>(s->event.size());
}

std::optional<double> SimRow::true_state_probability() const {
  if (truth.beta == 0.0) return std::nullopt;
  switch (truth.form) {
    case TruthForm::Linear: return p_z1;
    case TruthForm::Cutoff: return p_tau[truth.cutoff - 1];
    case TruthForm::Null: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

struct ReplicationOutcome {
  PosteriorSummary summary;
  double censoring = 0.0;
  bool converged = true;
};

ReplicationOutcome run_one(const ScenarioSpec& spec, int r) {
  const SimDataset data = generate_dataset(spec, r);
  const OrdinalDesign design = OrdinalDesign::from_columns(data.columns, spec.min_cell, {}, spec.max_level());
  ChainConfig chain = spec.chain;
  chain.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r), 1);
  const auto draws = run_chains(design, data.outcome, spec.priors, chain, false);
  ReplicationOutcome out;
  out.summary = summarize(draws, design, spec.outcome);
  out.censoring = censoring_proportion(data.outcome);
  const auto conv = check_convergence(out.summary);
  out.converged = !conv.assessable || conv.passed;
  return out;
}

}  // namespace

SimReport run_replications(const ScenarioSpec& spec, bool parallel) {
  spec.validate();
  const int R = spec.replications;
  std::vector<ReplicationOutcome> results(R);
  std::vector<std::exception_ptr> errors(R);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < R; r = next++) {
      try {
        results[r] = run_one(spec, r);
      } catch (const Error& e) {
        errors[r] = std::make_exception_ptr(Error(e.code(), "replication " + std::to_string(r) + ": " + e.message()));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = parallel ? std::min<unsigned>(cores, static_cast<unsigned>(R)) : 1u;
  if (workers > 1) {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimReport rep;
  rep.scenario = spec.name;
  rep.outcome = spec.outcome;
  rep.replications = R;
  rep.max_level = spec.max_level();
  const double Rd = static_cast<double>(R);
  for (std::size_t j = 0; j < spec.truth.size(); ++j) {
    SimRow row;
    row.truth = spec.truth[j];
    row.p_tau.assign(spec.max_level(), 0.0);
    std::vector<double> estimates;
    for (const auto& res : results) {
      const auto& p = res.summary.predictors[j];
      const double b = p.beta.mean;
      estimates.push_back(b);
      row.beta_hat += b / Rd;
      row.mse += (b - row.truth.beta) * (b - row.truth.beta) / Rd;
      row.cp += (p.beta.ci_low <= row.truth.beta && row.truth.beta <= p.beta.ci_high) ? 1.0 / Rd : 0.0;
      row.selection += p.beta.selected ? 1.0 / Rd : 0.0;
      row.p_z1 += p.p_z1 / Rd;
      for (int k = 1; k <= spec.max_level(); ++k) row.p_tau[k - 1] += p.p_tau_at(k) / Rd;
    }
    if (R > 1) {
      double ss = 0.0;
      for (double b : estimates) ss += (b - row.beta_hat) * (b - row.beta_hat);
      row.sd = std::sqrt(ss / (Rd - 1.0));
    }
    rep.rows.push_back(std::move(row));
  }
  for (const auto& res : results) {
    rep.mean_censoring += res.censoring / Rd;
    if (!res.converged) ++rep.rhat_failures;
    rep.summaries.push_back(res.summary);
  }
  return rep;
}

void write_report_csv(const SimReport& report, std::ostream& os) {
  std::vector<std::string> header{"beta_true", "beta_hat", "sd", "mse", "cp", "selection_prop", "cutoff_true", "p_z1"};
  for (int k = 1; k <= report.max_level; ++k) header.push_back("p_tau_" + std::to_string(k));
  write_csv_row(os, header);
  for (const auto& r : report.rows) {
    std::vector<std::string> fields{format_number(r.truth.beta), format_number(r.beta_hat), format_number(r.sd),
                                    format_number(r.mse),        format_number(r.cp),       format_number(r.selection),
                                    r.truth.label(),             format_number(r.p_z1)};
    for (double p : r.p_tau) fields.push_back(format_number(p));
    write_csv_row(os, fields);
  }
}

std::string format_report(const SimReport& report) {
  std::ostringstream os;
  os << report.scenario << " (" << to_string(report.outcome) << ", " << report.replications << " replications)\n";
  os << std::fixed << std::setprecision(3);
  os << std::setw(7) << "beta" << std::setw(8) << "hat" << std::setw(7) << "sd" << std::setw(7) << "mse"
     << std::setw(7) << "cp" << std::setw(7) << "sel" << std::setw(8) << "cutoff" << std::setw(7) << "z=1";
  for (int k = 1; k <= report.max_level; ++k) os << std::setw(7) << ("tau" + std::to_string(k));
  os << '\n';
  for (const auto& r : report.rows) {
    os << std::setw(7) << r.truth.beta << std::setw(8) << r.beta_hat << std::setw(7) << r.sd << std::setw(7) << r.mse
       << std::setw(7) << r.cp << std::setw(7) << r.selection << std::setw(8) << r.truth.label() << std::setw(7)
       << r.p_z1;
    for (double p : r.p_tau) os << std::setw(7) << p;
    os << '\n';
  }
  if (report.outcome == OutcomeKind::Survival) os << "mean censoring proportion: " << report.mean_censoring << '\n';
  os << "replications failing the R-hat check: " << report.rhat_failures << '\n';
  return os.str();
}

}  // namespace ordmix
