#pragma once

#include <span>
#include <string>
#include <vector>

namespace ordmix {

/// Functional form of one predictor: linear in its level (scaled by two
/// sample standard deviations) or the indicator I(x < tau).
struct TransformConfig {
  int z = 1;    // 1 = linear, 0 = dichotomized at tau
  int tau = 1;  // only meaningful when z == 0

  static TransformConfig linear() { return {1, 1}; }
  static TransformConfig cutoff(int tau) { return {0, tau}; }

  bool is_linear() const { return z == 1; }
  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

/// Sample standard deviation (n - 1 denominator).
/// Throws InsufficientData for fewer than two values, ConstantColumn for zero variance.
double column_sd(std::span<const int> column);

/// Every k in 1..max_level such that {x < k} and {x >= k} each hold at least
/// min_cell observations, ascending. Throws NoAdmissibleCutoff when empty.
/// max_level defaults to the column maximum.
std::vector<int> candidate_cutoffs(std::span<const int> column, int min_cell, int max_level = -1);

/// Immutable n x J matrix of ordinal levels with per-predictor level counts,
/// standard deviations and admissible cutoffs.
class OrdinalDesign {
 public:
  /// columns[j][i] is the level of subject i on predictor j. Each column must
  /// hold integers in [0, max_levels[j]] and have nonzero variance; each
  /// cutoff list must be nonempty, strictly increasing and within 1..K_j.
  OrdinalDesign(std::vector<std::vector<int>> columns, std::vector<int> max_levels,
                std::vector<std::vector<int>> cutoffs, std::vector<std::string> names = {});

  /// Builds the design with K_j = column maximum (or the common max_level when
  /// given) and cutoffs from candidate_cutoffs(column, min_cell).
  static OrdinalDesign from_columns(std::vector<std::vector<int>> columns, int min_cell,
                                    std::vector<std::string> names = {}, int max_level = -1);

  int n() const { return n_; }
  int predictors() const { return static_cast<int>(columns_.size()); }
  int max_level(int j) const { return max_levels_[j]; }
  double sd(int j) const { return sd_[j]; }
  std::span<const int> column(int j) const { return columns_[j]; }
  int level(int i, int j) const { return columns_[j][i]; }
  const std::vector<int>& cutoffs(int j) const { return cutoffs_[j]; }
  const std::string& name(int j) const { return names_[j]; }

  /// Number of forms predictor j can take: 1 + |cutoffs(j)|.
  int config_count(int j) const { return 1 + static_cast<int>(cutoffs_[j].size()); }
  /// Form index 0 is linear; index k >= 1 is the cutoff cutoffs(j)[k - 1].
  TransformConfig config_at(int j, int index) const;
  int config_index(int j, const TransformConfig& cfg) const;
  bool admissible(int j, const TransformConfig& cfg) const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> columns_;
  std::vector<int> max_levels_;
  std::vector<double> sd_;
  std::vector<std::vector<int>> cutoffs_;
  std::vector<std::string> names_;
};

/// f(x_ij): x / (2 sd_j) when cfg is linear, I(x < tau) otherwise.
std::vector<double> transform_predictor(const OrdinalDesign& design, int j, const TransformConfig& cfg);

/// eta_i = alpha + sum_j beta_j f(x_ij).
std::vector<double> linear_predictor(const OrdinalDesign& design, std::span<const TransformConfig> cfgs,
                                     double alpha, std::span<const double> beta);

}  // namespace ordmix
