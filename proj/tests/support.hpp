#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ordmix/design.hpp"
#include "ordmix/random.hpp"

namespace ordmix::testing {

/// Kolmogorov-Smirnov distance between the empirical distribution of `draws`
/// and `cdf`.
inline double ks_distance(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max({d, std::fabs(f - static_cast<double>(i) / n), std::fabs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

/// Columns of uniformly drawn levels 0..max_level, each guaranteed to contain
/// every level at least once.
inline std::vector<std::vector<int>> random_columns(int n, int J, int max_level, Rng& rng) {
  std::vector<std::vector<int>> cols(J, std::vector<int>(n));
  for (auto& col : cols) {
    for (int i = 0; i < n; ++i) col[i] = i <= max_level ? i : static_cast<int>(rng.uniform() * (max_level + 1));
  }
  return cols;
}

/// f(x) computed directly from the column: x / (2 sd) or I(x < tau).
inline std::vector<double> basis_of(const std::vector<int>& col, int z, int tau) {
  const double n = static_cast<double>(col.size());
  double mean = 0.0;
  for (int x : col) mean += x / n;
  double ss = 0.0;
  for (int x : col) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> f(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) f[i] = z == 1 ? col[i] / (2.0 * sd) : (col[i] < tau ? 1.0 : 0.0);
  return f;
}

inline std::vector<double> softmax(std::vector<double> logw) {
  const double m = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) total += (w = std::exp(w - m));
  for (double& w : logw) w /= total;
  return logw;
}

}  // namespace ordmix::testing
