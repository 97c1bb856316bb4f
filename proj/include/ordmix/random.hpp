#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ordmix {

/// Seed mixing (SplitMix64 finalizer). Replication r of a simulation with
/// master seed s uses derive_seed(s, r, 0) for data generation and
/// derive_seed(s, r, 1) + c for chain c.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

/// Random stream owned by one chain. Every variate is produced from the
/// wrapped engine only, so a chain is a pure function of its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // (0, 1)
  double normal(double mean = 0.0, double sd = 1.0);
  double exponential(double rate);
  double gamma(double shape, double rate);
  double inv_gamma(double shape, double scale);
  double beta(double a, double b);
  double inv_gauss(double mean, double shape);

  /// Draws an index with probability proportional to exp(log_weights[k]).
  /// Returns -1 when every weight is -inf or NaN.
  int categorical_log(std::span<const double> log_weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

}  // namespace ordmix
