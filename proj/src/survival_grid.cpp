#include "ordmix/survival_grid.hpp"

#include <algorithm>

#include "ordmix/error.hpp"

namespace ordmix {

SurvivalGrid::SurvivalGrid(const SurvivalOutcome& outcome, double r) {
  const auto n = outcome.time.size();
  if (outcome.event.size() != n) throw Error(ErrorCode::DimensionMismatch, "time/event length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (outcome.event[i] == 1) times_.push_back(outcome.time[i]);
  }
  if (times_.empty()) throw Error(ErrorCode::InsufficientData, "survival outcome has no events");
  std::sort(times_.begin(), times_.end());
  times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
  const int M = size();

  const double last = times_.back();
  const double max_time = *std::max_element(outcome.time.begin(), outcome.time.end());
  if (max_time > last) {
    end_time_ = max_time;
  } else {
    const double gap = M > 1 ? (last - times_.front()) / (M - 1) : last;
    end_time_ = last + gap;
  }
  prior_increments_.resize(M);
  for (int m = 0; m < M; ++m) {
    const double next = m + 1 < M ? times_[m + 1] : end_time_;
    prior_increments_[m] = r * (next - times_[m]);
  }

  events_at_.assign(M, 0);
  at_risk_count_.resize(n);
  event_index_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = outcome.time[i];
    const auto upper = std::upper_bound(times_.begin(), times_.end(), t);
    at_risk_count_[i] = static_cast<int>(upper - times_.begin());
    if (outcome.event[i] == 1) {
      event_index_[i] = at_risk_count_[i] - 1;
      ++events_at_[event_index_[i]];
    }
  }
}

std::vector<double> SurvivalGrid::risk_sums(std::span<const double> weights) const {
  const int M = size();
  std::vector<double> bucket(M + 1, 0.0);
  for (int i = 0; i < subjects(); ++i) bucket[at_risk_count_[i]] += weights[i];
  std::vector<double> out(M);
  double acc = bucket[M];
  for (int m = M - 1; m >= 0; --m) {
    out[m] = acc;
    acc += bucket[m];
  }
  // out[m] must include subjects with count > m, i.e. buckets m+1..M
  return out;
}

std::vector<double> SurvivalGrid::cumulative_hazard(std::span<const double> increments) const {
  const int M = size();
  std::vector<double> prefix(M + 1, 0.0);
  for (int m = 0; m < M; ++m) prefix[m + 1] = prefix[m] + increments[m];
  std::vector<double> out(subjects());
  for (int i = 0; i < subjects(); ++i) out[i] = prefix[at_risk_count_[i]];
  return out;
}

}  // namespace ordmix
