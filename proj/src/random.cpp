#include "ordmix/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordmix/error.hpp"

namespace ordmix {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoAdmissibleCutoff: return "NoAdmissibleCutoff";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::InsufficientChains: return "InsufficientChains";
    case ErrorCode::EmptyDraws: return "EmptyDraws";
    case ErrorCode::TooManyConfigurations: return "TooManyConfigurations";
    case ErrorCode::UnsupportedPenalty: return "UnsupportedPenalty";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NumericalError:
    case ErrorCode::Io:
      return false;
    default:
      return true;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ stream) ^ index);
}

double Rng::uniform() {
  // 53-bit mantissa, shifted off zero
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal(double mean, double sd) { return mean + sd * std_normal_(engine_); }

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

double Rng::gamma(double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_) / rate;
}

double Rng::inv_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

// Michael, Schucany and Haas (1976). The smaller root is written as
// mean / (1 + w + sqrt(w^2 + 2w)) with w = mean * chi2 / (2 * shape),
// which stays positive without cancellation.
double Rng::inv_gauss(double mean, double shape) {
  const double v = normal();
  const double w = mean * v * v / (2.0 * shape);
  const double root = mean / (1.0 + w + std::sqrt(w * w + 2.0 * w));
  if (uniform() <= mean / (mean + root)) return root;
  return mean * mean / root;
}

int Rng::categorical_log(std::span<const double> log_weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (!std::isnan(w)) top = std::max(top, w);
  }
  if (!std::isfinite(top)) return -1;
  double total = 0.0;
  for (double w : log_weights) {
    if (!std::isnan(w)) total += std::exp(w - top);
  }
  double u = uniform() * total;
  int last = -1;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    if (std::isnan(log_weights[k])) continue;
    const double p = std::exp(log_weights[k] - top);
    if (p > 0.0) last = static_cast<int>(k);
    if (u < p) return static_cast<int>(k);
    u -= p;
  }
  return last;
}

}  // namespace ordmix
