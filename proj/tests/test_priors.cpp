#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gaussian.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "ordmix/error.hpp"
#include "ordmix/priors.hpp"
#include "ordmix/random.hpp"
#include "support.hpp"

using namespace ordmix;
using ordmix::testing::ks_distance;

namespace {

double double_exponential_cdf(double x, double rate) {
  return x < 0.0 ? 0.5 * std::exp(rate * x) : 1.0 - 0.5 * std::exp(-rate * x);
}

}  // namespace

TEST_CASE("Rng variates match their distributions") {
  Rng rng(11);
  constexpr int kDraws = 100000;
  std::vector<double> g(kDraws), b(kDraws), ig(kDraws), e(kDraws);
  for (int i = 0; i < kDraws; ++i) {
    g[i] = rng.gamma(0.7, 2.5);
    b[i] = rng.beta(0.5, 3.0);
    ig[i] = rng.inv_gauss(1.5, 2.0);
    e[i] = rng.exponential(0.3);
  }
  const boost::math::gamma_distribution<double> gd(0.7, 1.0 / 2.5);
  const boost::math::beta_distribution<double> bd(0.5, 3.0);
  const boost::math::inverse_gaussian_distribution<double> igd(1.5, 2.0);
  CHECK(ks_distance(g, [&](double x) { return cdf(gd, x); }) < 0.01);
  CHECK(ks_distance(b, [&](double x) { return cdf(bd, x); }) < 0.01);
  CHECK(ks_distance(ig, [&](double x) { return cdf(igd, x); }) < 0.01);
  CHECK(ks_distance(e, [](double x) { return 1.0 - std::exp(-0.3 * x); }) < 0.01);
}

TEST_CASE("inverse-gamma draws use the scale parameterization") {
  Rng rng(12);
  std::vector<double> draws(100000);
  for (double& d : draws) d = rng.inv_gamma(3.0, 2.0);
  const boost::math::gamma_distribution<double> gd(3.0, 1.0 / 2.0);
  CHECK(ks_distance(draws, [&](double x) { return 1.0 - cdf(gd, 1.0 / x); }) < 0.01);
}

TEST_CASE("derive_seed is deterministic and separates streams") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 0) != derive_seed(1, 2, 1));
  CHECK(derive_seed(1, 2, 0) != derive_seed(1, 3, 0));
  CHECK(derive_seed(1, 2, 0) != derive_seed(2, 2, 0));
}

TEST_CASE("exponential scale mixture of normals integrates to the double exponential") {
  const double rate = 1.7;
  for (double beta : {0.05, 0.4, 1.0, 2.5}) {
    auto integrand = [&](double s) {
      const double mix = 0.5 * rate * rate * std::exp(-0.5 * rate * rate * s);
      return std::exp(-0.5 * beta * beta / s) / std::sqrt(2.0 * std::numbers::pi * s) * mix;
    };
    const double mixed = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-12);
    const double de = 0.5 * rate * std::exp(-rate * beta);
    CHECK(mixed == doctest::Approx(de).epsilon(1e-8));
  }
}

TEST_CASE("lasso local scales have the analytic conditional moments") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Lasso;
  cfg.lambda = 0.8;
  const double precision = 2.0;
  const double rate = cfg.lambda * precision;
  const std::vector<double> beta{0.7};
  Rng rng(21);
  auto aux = PenaltyAuxiliaries::initial(1);
  constexpr int kDraws = 100000;
  double mean_s = 0.0, mean_inv = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    update_lasso_auxiliaries(aux, beta, cfg, precision, rng);
    mean_s += aux.local_scale[0] / kDraws;
    mean_inv += 1.0 / aux.local_scale[0] / kDraws;
  }
  CHECK(mean_inv == doctest::Approx(rate / 0.7).epsilon(0.01));
  CHECK(mean_s == doctest::Approx(0.7 / rate + 1.0 / (rate * rate)).epsilon(0.01));
}

TEST_CASE("lasso local scale at beta = 0 is positive and finite") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Lasso;
  cfg.lambda = 0.01;
  const std::vector<double> beta{0.0, 0.0};
  Rng rng(22);
  auto aux = PenaltyAuxiliaries::initial(2);
  for (int i = 0; i < 50000; ++i) {
    update_lasso_auxiliaries(aux, beta, cfg, 1.0, rng);
    for (double s : aux.local_scale) {
      CHECK(std::isfinite(s));
      CHECK(s > 0.0);
    }
  }
}

TEST_CASE("lasso hierarchy forward simulation gives the double exponential marginal") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Lasso;
  cfg.lambda = 1.3;
  const double precision = 1.0;
  const double rate = lasso_rate(cfg, precision);
  Rng rng(23);
  std::vector<double> draws(200000);
  auto aux = PenaltyAuxiliaries::initial(1);
  for (double& b : draws) {
    // s ~ Exp(rate^2 / 2), beta | s ~ N(0, s)
    aux.local_scale[0] = rng.exponential(0.5 * rate * rate);
    b = rng.normal(0.0, std::sqrt(beta_prior_variance(0, aux, cfg)));
  }
  CHECK(ks_distance(draws, [&](double x) { return double_exponential_cdf(x, rate); }) < 0.02);

  // Gibbs between beta | s and s | beta leaves the double exponential invariant.
  std::vector<double> chain;
  double beta = 0.3;
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> b{beta};
    update_lasso_auxiliaries(aux, b, cfg, precision, rng);
    beta = rng.normal(0.0, std::sqrt(aux.local_scale[0]));
    chain.push_back(beta);
  }
  CHECK(ks_distance(chain, [&](double x) { return double_exponential_cdf(x, rate); }) < 0.02);

  // Histogram of the marginal against the density.
  const double width = 0.25;
  double sup = 0.0;
  for (double lo = -3.0; lo < 3.0; lo += width) {
    const double count = static_cast<double>(
        std::count_if(draws.begin(), draws.end(), [&](double x) { return x >= lo && x < lo + width; }));
    const double density = count / (draws.size() * width);
    const double exact = (double_exponential_cdf(lo + width, rate) - double_exponential_cdf(lo, rate)) / width;
    sup = std::max(sup, std::fabs(density - exact));
  }
  CHECK(sup < 0.02);
}

TEST_CASE("lasso precision conditional for non-Gaussian outcomes") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Lasso;
  cfg.lambda = 0.5;
  const std::vector<double> beta{1.0, -2.0, 0.5};
  Rng rng(24);
  auto aux = PenaltyAuxiliaries::initial(3);
  std::vector<double> draws(100000);
  for (double& d : draws) {
    update_lasso_precision(aux, beta, cfg, rng);
    d = aux.precision;
  }
  const boost::math::gamma_distribution<double> gd(cfg.lasso_precision_shape + 3.0,
                                                   1.0 / (cfg.lasso_precision_rate + 0.5 * 3.5));
  CHECK(ks_distance(draws, [&](double x) { return cdf(gd, x); }) < 0.01);
}

TEST_CASE("horseshoe expansion leaves half-Cauchy scales under the prior") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Horseshoe;
  cfg.lambda = 1.0;
  Rng rng(31);
  auto aux = PenaltyAuxiliaries::initial(1);
  std::vector<double> local, global;
  // Alternate beta ~ prior and the auxiliary conditionals: the scales then
  // sample their prior marginal.
  for (int i = 0; i < 200000; ++i) {
    const double b = rng.normal(0.0, std::sqrt(beta_prior_variance(0, aux, cfg)));
    const std::vector<double> beta{b};
    update_horseshoe_auxiliaries(aux, beta, cfg, rng);
    if (i % 2 == 0) {
      local.push_back(aux.local[0]);
      global.push_back(aux.global);
    }
  }
  auto half_cauchy = [](double x) { return 2.0 / std::numbers::pi * std::atan(x); };
  CHECK(ks_distance(local, half_cauchy) < 0.02);
  CHECK(ks_distance(global, half_cauchy) < 0.02);
}

TEST_CASE("horseshoe prior variance is lambda g^2 l^2") {
  PriorConfig cfg;
  cfg.penalty = PenaltyKind::Horseshoe;
  cfg.lambda = 0.01;
  auto aux = PenaltyAuxiliaries::initial(2);
  aux.global = 2.0;
  aux.local = {3.0, 0.5};
  CHECK(beta_prior_variance(0, aux, cfg) == doctest::Approx(0.01 * 4.0 * 9.0));
  CHECK(beta_prior_variance(1, aux, cfg) == doctest::Approx(0.01 * 4.0 * 0.25));
  cfg.penalty = PenaltyKind::None;
  CHECK(beta_prior_variance(0, aux, cfg) == cfg.beta_variance);
}

TEST_CASE("prior validation and parsing") {
  PriorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda = 0.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.penalty = PenaltyKind::Lasso;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.lambda = 1.0;
  cfg.sigma2_shape = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_penalty("lasso") == PenaltyKind::Lasso);
  CHECK(parse_penalty("horseshoe") == PenaltyKind::Horseshoe);
  CHECK(parse_penalty("none") == PenaltyKind::None);
  CHECK_THROWS_AS(parse_penalty("ridge"), Error);
}
