#pragma once

#include <span>
#include <vector>

#include "ordmix/outcome.hpp"

namespace ordmix {

/// Counting-process discretization of right-censored data on the unique
/// observed event times t_1 < ... < t_M. Interval m is [t_m, t_{m+1}); the
/// closing point t_{M+1} is the largest observed time, or one mean event gap
/// past t_M when nothing is observed after the last event.
class SurvivalGrid {
 public:
  SurvivalGrid(const SurvivalOutcome& outcome, double r);

  int size() const { return static_cast<int>(times_.size()); }
  int subjects() const { return static_cast<int>(at_risk_count_.size()); }
  const std::vector<double>& grid_times() const { return times_; }
  double end_time() const { return end_time_; }
  /// dLambda*_m = r * (t_{m+1} - t_m).
  const std::vector<double>& prior_increments() const { return prior_increments_; }
  /// Events falling on grid point m.
  const std::vector<int>& events_at() const { return events_at_; }

  /// Y_i(t_m): subject i is still observed at t_m.
  bool at_risk(int i, int m) const { return m < at_risk_count_[i]; }
  /// dN_i(t_m).
  int dN(int i, int m) const { return event_index_[i] == m ? 1 : 0; }
  /// Grid index of subject i's event, or -1 when censored.
  int event_index(int i) const { return event_index_[i]; }
  /// Number of grid points at which subject i is at risk.
  int at_risk_count(int i) const { return at_risk_count_[i]; }

  /// R_m = sum_i Y_i(t_m) w_i for every grid point.
  std::vector<double> risk_sums(std::span<const double> weights) const;
  /// H_i = sum_m Y_i(t_m) dLambda_m for every subject.
  std::vector<double> cumulative_hazard(std::span<const double> increments) const;

 private:
  std::vector<double> times_;
  double end_time_ = 0.0;
  std::vector<double> prior_increments_;
  std::vector<int> events_at_;
  std::vector<int> at_risk_count_;
  std::vector<int> event_index_;
};

}  // namespace ordmix
