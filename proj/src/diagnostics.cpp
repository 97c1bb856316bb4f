#include "ordmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ordmix/error.hpp"

namespace ordmix {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

std::optional<double> rhat_or_none(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) return std::nullopt;
  for (const auto& c : chains) {
    if (c.size() != chains.front().size() || c.size() < 2) return std::nullopt;
  }
  try {
    return gelman_rubin(chains);
  } catch (const Error&) {
    // a parameter that never moves in any chain has no defined ratio
    return std::nullopt;
  }
}

}  // namespace

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw Error(ErrorCode::InsufficientChains, "R-hat needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "R-hat needs at least two draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw Error(ErrorCode::DimensionMismatch, "R-hat needs chains of equal length");
  }
  const double m = static_cast<double>(chains.size());
  const double nd = static_cast<double>(n);
  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    const double mu = mean_of(c);
    means.push_back(mu);
    w += variance_of(c, mu);
  }
  w /= m;
  const double grand = mean_of(means);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b = nd * b / (m - 1.0);
  if (!(w > 0.0)) throw Error(ErrorCode::NumericalError, "R-hat undefined: zero within-chain variance");
  return std::sqrt(((nd - 1.0) / nd * w + b / nd) / w);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyDraws, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ScalarSummary summarize_scalar(std::string name, std::span<const double> draws) {
  if (draws.empty()) throw Error(ErrorCode::EmptyDraws, "no draws to summarize for " + name);
  ScalarSummary s;
  s.name = std::move(name);
  s.mean = mean_of(draws);
  s.sd = std::sqrt(variance_of(draws, s.mean));
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  s.ci_low = quantile_sorted(sorted, 0.025);
  s.ci_high = quantile_sorted(sorted, 0.975);
  s.selected = s.ci_low > 0.0 || s.ci_high < 0.0;
  return s;
}

double PredictorSummary::p_tau_at(int level) const {
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    if (cutoffs[k] == level) return p_tau[k];
  }
  return 0.0;
}

PosteriorSummary summarize(const std::vector<DrawStore>& chains, const OrdinalDesign& design, OutcomeKind kind) {
  std::size_t total = 0;
  for (const auto& c : chains) {
    if (c.predictors != design.predictors())
      throw Error(ErrorCode::DimensionMismatch, "draw store does not match the design");
    total += c.size();
  }
  if (total == 0) throw Error(ErrorCode::EmptyDraws, "no posterior draws to summarize");

  PosteriorSummary out;
  out.kind = kind;
  out.draws = total;
  out.chains = static_cast<int>(chains.size());

  auto pooled = [&](auto&& series_of) {
    std::vector<std::vector<double>> per_chain;
    std::vector<double> all;
    for (const auto& c : chains) {
      per_chain.push_back(series_of(c));
      all.insert(all.end(), per_chain.back().begin(), per_chain.back().end());
    }
    return std::pair{std::move(per_chain), std::move(all)};
  };

  auto scalar = [&](const std::string& name, auto&& series_of) {
    auto [per_chain, all] = pooled(series_of);
    auto s = summarize_scalar(name, all);
    s.rhat = rhat_or_none(per_chain);
    return s;
  };

  if (kind != OutcomeKind::Survival) {
    out.alpha = scalar("alpha", [](const DrawStore& c) { return c.alpha; });
    out.alpha->selected = out.alpha->ci_low > 0.0 || out.alpha->ci_high < 0.0;
  }
  if (kind == OutcomeKind::Continuous) {
    out.sigma2 = scalar("sigma2", [](const DrawStore& c) { return c.sigma2; });
    out.sigma2->selected = false;
  }

  for (int j = 0; j < design.predictors(); ++j) {
    PredictorSummary p;
    p.beta = scalar(design.name(j), [j](const DrawStore& c) { return c.beta_series(j); });
    p.cutoffs = design.cutoffs(j);
    std::vector<long> counts(p.cutoffs.size(), 0);
    long linear = 0;
    for (const auto& c : chains) {
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (c.z_at(d, j) == 1) {
          ++linear;
          continue;
        }
        const auto it = std::find(p.cutoffs.begin(), p.cutoffs.end(), c.tau_at(d, j));
        if (it == p.cutoffs.end())
          throw Error(ErrorCode::InvalidArgument, "draw has an inadmissible cutoff for " + design.name(j));
        ++counts[it - p.cutoffs.begin()];
      }
    }
    const double n = static_cast<double>(total);
    p.p_z1 = static_cast<double>(linear) / n;
    for (long k : counts) p.p_tau.push_back(static_cast<double>(k) / n);
    out.predictors.push_back(std::move(p));
  }
  return out;
}

std::string ConvergenceReport::text() const {
  std::ostringstream os;
  os << std::setprecision(6);
  if (!assessable) {
    os << "convergence: not assessable (R-hat needs at least two chains)\n";
    return os.str();
  }
  os << "convergence: " << (passed ? "pass" : "fail") << " (R-hat threshold " << threshold << ")\n";
  for (const auto& [name, r] : rhats) os << "  " << name << " " << r << '\n';
  if (!offenders.empty()) {
    os << "offenders:";
    for (const auto& [name, r] : offenders) os << ' ' << name << '=' << r;
    os << '\n';
  }
  return os.str();
}

ConvergenceReport check_convergence(const PosteriorSummary& summary, double threshold) {
  ConvergenceReport rep;
  rep.threshold = threshold;
  auto visit = [&](const ScalarSummary& s) {
    if (!s.rhat) return;
    rep.rhats.emplace_back(s.name, *s.rhat);
    if (!(*s.rhat < threshold)) rep.offenders.emplace_back(s.name, *s.rhat);
  };
  if (summary.alpha) visit(*summary.alpha);
  for (const auto& p : summary.predictors) visit(p.beta);
  if (summary.sigma2) visit(*summary.sigma2);
  rep.assessable = !rep.rhats.empty();
  rep.passed = rep.assessable && rep.offenders.empty();
  return rep;
}

}  // namespace ordmix
