#include "ordmix/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ordmix/error.hpp"

namespace ordmix {

double column_sd(std::span<const int> column) {
  const auto n = column.size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "standard deviation needs at least two values");
  const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (int x : column) ss += (x - mean) * (x - mean);
  if (ss <= 0.0) throw Error(ErrorCode::ConstantColumn, "column has zero variance");
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<int> candidate_cutoffs(std::span<const int> column, int min_cell, int max_level) {
  if (min_cell < 1) throw Error(ErrorCode::InvalidArgument, "min_cell must be >= 1");
  if (column.empty()) throw Error(ErrorCode::InsufficientData, "empty column");
  const int top = max_level >= 0 ? max_level : *std::max_element(column.begin(), column.end());
  std::vector<long> counts(static_cast<std::size_t>(top) + 1, 0);
  for (int x : column) {
    if (x < 0 || x > top) throw Error(ErrorCode::InvalidArgument, "level outside 0..K");
    ++counts[x];
  }
  const long n = static_cast<long>(column.size());
  std::vector<int> out;
  long below = 0;
  for (int k = 1; k <= top; ++k) {
    below += counts[k - 1];
    if (below >= min_cell && n - below >= min_cell) out.push_back(k);
  }
  if (out.empty()) throw Error(ErrorCode::NoAdmissibleCutoff, "no threshold leaves min_cell observations on both sides");
  return out;
}

OrdinalDesign::OrdinalDesign(std::vector<std::vector<int>> columns, std::vector<int> max_levels,
                             std::vector<std::vector<int>> cutoffs, std::vector<std::string> names)
    : columns_(std::move(columns)),
      max_levels_(std::move(max_levels)),
      cutoffs_(std::move(cutoffs)),
      names_(std::move(names)) {
  const auto J = columns_.size();
  if (J == 0) throw Error(ErrorCode::InsufficientData, "design has no predictors");
  if (max_levels_.size() != J || cutoffs_.size() != J)
    throw Error(ErrorCode::DimensionMismatch, "levels/cutoffs do not match predictor count");
  if (names_.empty()) {
    for (std::size_t j = 0; j < J; ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (names_.size() != J) throw Error(ErrorCode::DimensionMismatch, "names do not match predictor count");

  n_ = static_cast<int>(columns_[0].size());
  sd_.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& col = columns_[j];
    if (static_cast<int>(col.size()) != n_)
      throw Error(ErrorCode::DimensionMismatch, "predictor " + names_[j] + " has a different length");
    for (int x : col) {
      if (x < 0 || x > max_levels_[j])
        throw Error(ErrorCode::InvalidArgument, "predictor " + names_[j] + " has a level outside 0..K");
    }
    try {
      sd_[j] = column_sd(col);
    } catch (const Error& e) {
      throw Error(e.code(), "predictor " + names_[j] + ": " + e.message());
    }
    const auto& cuts = cutoffs_[j];
    if (cuts.empty()) throw Error(ErrorCode::NoAdmissibleCutoff, "predictor " + names_[j] + " has no cutoffs");
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      if (cuts[k] < 1 || cuts[k] > max_levels_[j] || (k > 0 && cuts[k] <= cuts[k - 1]))
        throw Error(ErrorCode::InvalidArgument, "predictor " + names_[j] + " has invalid cutoffs");
    }
  }
}

OrdinalDesign OrdinalDesign::from_columns(std::vector<std::vector<int>> columns, int min_cell,
                                          std::vector<std::string> names, int max_level) {
  std::vector<int> levels;
  std::vector<std::vector<int>> cuts;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& col = columns[j];
    if (col.empty()) throw Error(ErrorCode::InsufficientData, "empty predictor column");
    const int top = max_level >= 0 ? max_level : *std::max_element(col.begin(), col.end());
    levels.push_back(top);
    try {
      column_sd(col);
      cuts.push_back(candidate_cutoffs(col, min_cell, top));
    } catch (const Error& e) {
      const std::string label = j < names.size() ? names[j] : "x" + std::to_string(j + 1);
      throw Error(e.code(), "predictor " + label + ": " + e.message());
    }
  }
  return OrdinalDesign(std::move(columns), std::move(levels), std::move(cuts), std::move(names));
}

TransformConfig OrdinalDesign::config_at(int j, int index) const {
  if (index == 0) return TransformConfig::linear();
  return TransformConfig::cutoff(cutoffs_[j][index - 1]);
}

int OrdinalDesign::config_index(int j, const TransformConfig& cfg) const {
  if (cfg.is_linear()) return 0;
  const auto& cuts = cutoffs_[j];
  const auto it = std::lower_bound(cuts.begin(), cuts.end(), cfg.tau);
  if (it == cuts.end() || *it != cfg.tau)
    throw Error(ErrorCode::InvalidArgument, "tau is not an admissible cutoff for " + names_[j]);
  return 1 + static_cast<int>(it - cuts.begin());
}

bool OrdinalDesign::admissible(int j, const TransformConfig& cfg) const {
  if (cfg.z != 0 && cfg.z != 1) return false;
  if (cfg.is_linear()) return true;
  return std::binary_search(cutoffs_[j].begin(), cutoffs_[j].end(), cfg.tau);
}

std::vector<double> transform_predictor(const OrdinalDesign& design, int j, const TransformConfig& cfg) {
  const auto col = design.column(j);
  std::vector<double> out(col.size());
  if (cfg.is_linear()) {
    const double scale = 2.0 * design.sd(j);
    std::transform(col.begin(), col.end(), out.begin(), [scale](int x) { return x / scale; });
  } else {
    std::transform(col.begin(), col.end(), out.begin(), [tau = cfg.tau](int x) { return x < tau ? 1.0 : 0.0; });
  }
  return out;
}

std::vector<double> linear_predictor(const OrdinalDesign& design, std::span<const TransformConfig> cfgs,
                                     double alpha, std::span<const double> beta) {
  const int J = design.predictors();
  if (static_cast<int>(cfgs.size()) != J || static_cast<int>(beta.size()) != J)
    throw Error(ErrorCode::DimensionMismatch, "need one config and one coefficient per predictor");
  std::vector<double> eta(design.n(), alpha);
  for (int j = 0; j < J; ++j) {
    if (beta[j] == 0.0) continue;
    const auto f = transform_predictor(design, j, cfgs[j]);
    for (int i = 0; i < design.n(); ++i) eta[i] += beta[j] * f[i];
  }
  return eta;
}

}  // namespace ordmix
