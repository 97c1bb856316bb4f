#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "doctest.h"
#include "ordmix/csv.hpp"
#include "ordmix/error.hpp"
#include "ordmix/simulation.hpp"

using namespace ordmix;

namespace {

ScenarioSpec small_spec(OutcomeKind kind) {
  ScenarioSpec s;
  s.name = "small";
  s.outcome = kind;
  s.n = kind == OutcomeKind::Continuous ? 40 : 80;
  s.rho = 0.25;
  s.truth = {PredictorTruth::parse(0.5, "tau2"), PredictorTruth::parse(0.0, "null"),
             PredictorTruth::parse(0.5, "linear")};
  s.replications = 2;
  s.seed = 5;
  s.chain.n_iter = 400;
  s.chain.burn_in = 100;
  return s;
}

}  // namespace

TEST_CASE("truth labels parse and print") {
  CHECK(PredictorTruth::parse(1.0, "linear").form == TruthForm::Linear);
  CHECK(PredictorTruth::parse(1.0, "tau2").cutoff == 2);
  CHECK(PredictorTruth::parse(1.0, "3").cutoff == 3);
  CHECK(PredictorTruth::parse(0.0, "null").label() == "null");
  CHECK(PredictorTruth::parse(1.0, "tau1").label() == "1");
  CHECK(PredictorTruth::parse(1.0, "linear").label() == "linear");
  CHECK_THROWS_AS(PredictorTruth::parse(1.0, "quadratic"), Error);
}

TEST_CASE("ordinal levels follow the standard-normal percentile cuts") {
  Rng rng(301);
  const std::vector<double> pct{30.0, 60.0, 85.0};
  const int n = 100000;
  const auto cols = gen_ordinal_predictors(n, 1, 0.0, pct, rng);
  std::vector<double> freq(4, 0.0);
  for (int x : cols[0]) freq[x] += 1.0 / n;
  const std::vector<double> expected{0.30, 0.30, 0.25, 0.15};
  for (int k = 0; k < 4; ++k) CHECK(std::fabs(freq[k] - expected[k]) < 4.0 * std::sqrt(expected[k] / n));
}

TEST_CASE("latent normals share the requested correlation") {
  Rng rng(302);
  const int n = 50000;
  const std::vector<double> pct{50.0};
  const auto cols = gen_ordinal_predictors(n, 2, 0.5, pct, rng);
  // for bivariate normals cut at their medians P(both low) = 1/4 + asin(rho) / (2 pi)
  double both = 0.0;
  for (int i = 0; i < n; ++i) both += (cols[0][i] == 0 && cols[1][i] == 0) ? 1.0 / n : 0.0;
  CHECK(both == doctest::Approx(0.25 + std::asin(0.5) / (2.0 * std::numbers::pi)).epsilon(0.02));
  CHECK_THROWS_AS(gen_ordinal_predictors(10, 2, 1.0, pct, rng), Error);
}

TEST_CASE("continuous outcomes carry the stated residual sd") {
  ScenarioSpec s = small_spec(OutcomeKind::Continuous);
  s.n = 20000;
  s.intercept = 0.7;
  const auto data = generate_dataset(s, 0);
  const auto& y = std::get<ContinuousOutcome>(data.outcome).y;
  const double sd0 = [&] {
    double m = 0.0;
    for (int x : data.columns[2]) m += x / static_cast<double>(s.n);
    double ss = 0.0;
    for (int x : data.columns[2]) ss += (x - m) * (x - m);
    return std::sqrt(ss / (s.n - 1.0));
  }();
  double ss = 0.0, mean_resid = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const double eta = 0.7 + 0.5 * (data.columns[0][i] < 2) + 0.5 * data.columns[2][i] / (2.0 * sd0);
    const double r = y[i] - eta;
    ss += r * r;
    mean_resid += r / s.n;
  }
  CHECK(std::sqrt(ss / s.n) == doctest::Approx(0.1).epsilon(0.03));
  CHECK(std::fabs(mean_resid) < 0.005);
}

TEST_CASE("survival censoring follows the competing exponential rates") {
  ScenarioSpec s = small_spec(OutcomeKind::Survival);
  s.truth = {PredictorTruth::parse(0.0, "null")};
  s.n = 40000;
  s.censoring_rate = 0.25;
  s.baseline_hazard = 1.0;
  const auto data = generate_dataset(s, 0);
  // T ~ Exp(1), C ~ Exp(0.25): P(C < T) = 0.25 / 1.25
  CHECK(censoring_proportion(data.outcome) == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("datasets are deterministic per replication") {
  const ScenarioSpec s = small_spec(OutcomeKind::Binary);
  std::ostringstream a, b, c;
  write_dataset_csv(generate_dataset(s, 1), a);
  write_dataset_csv(generate_dataset(s, 1), b);
  write_dataset_csv(generate_dataset(s, 2), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("a single replication report is that replication's summary") {
  ScenarioSpec s = small_spec(OutcomeKind::Continuous);
  s.replications = 1;
  const auto rep = run_replications(s);
  REQUIRE(rep.summaries.size() == 1);
  for (std::size_t j = 0; j < s.truth.size(); ++j) {
    const auto& row = rep.rows[j];
    const auto& p = rep.summaries[0].predictors[j];
    CHECK(row.beta_hat == p.beta.mean);
    CHECK(row.mse == doctest::Approx((p.beta.mean - s.truth[j].beta) * (p.beta.mean - s.truth[j].beta)));
    CHECK(row.sd == 0.0);
    CHECK(row.p_z1 == p.p_z1);
    CHECK(row.selection == (p.beta.selected ? 1.0 : 0.0));
    CHECK(row.cp == ((p.beta.ci_low <= s.truth[j].beta && s.truth[j].beta <= p.beta.ci_high) ? 1.0 : 0.0));
  }
}

TEST_CASE("replication reports are deterministic and thread independent") {
  for (const auto kind : {OutcomeKind::Continuous, OutcomeKind::Binary, OutcomeKind::Survival}) {
    const ScenarioSpec s = small_spec(kind);
    std::ostringstream a, b;
    write_report_csv(run_replications(s, true), a);
    write_report_csv(run_replications(s, false), b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("report CSV has the table columns") {
  const ScenarioSpec s = small_spec(OutcomeKind::Survival);
  const auto rep = run_replications(s);
  std::ostringstream os;
  write_report_csv(rep, os);
  std::istringstream is(os.str());
  const auto table = read_csv(is);
  const std::vector<std::string> expected{"beta_true", "beta_hat",    "sd",   "mse",     "cp",      "selection_prop",
                                          "cutoff_true", "p_z1", "p_tau_1", "p_tau_2", "p_tau_3"};
  CHECK(table.header == expected);
  CHECK(table.rows.size() == 3);
  CHECK(table.rows[0][6] == "2");
  CHECK(format_report(rep).find("censoring") != std::string::npos);
  const auto tsp = rep.rows[0].true_state_probability();
  REQUIRE(tsp.has_value());
  CHECK(*tsp == rep.rows[0].p_tau[1]);
  CHECK_FALSE(rep.rows[1].true_state_probability().has_value());
}

TEST_CASE("scenario validation") {
  ScenarioSpec s = small_spec(OutcomeKind::Continuous);
  CHECK_NOTHROW(s.validate());
  s.replications = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_spec(OutcomeKind::Continuous);
  s.truth.push_back(PredictorTruth::parse(1.0, "tau4"));
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_spec(OutcomeKind::Continuous);
  s.percentiles = {60.0, 30.0};
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_spec(OutcomeKind::Continuous);
  s.rho = -0.1;
  CHECK_THROWS_AS(s.validate(), Error);
}
