#include "ordmix/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include "ordmix/error.hpp"

namespace ordmix {

namespace {

std::string where(const std::string& column, std::size_t row) {
  return "column '" + column + "', row " + std::to_string(row + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "NaN" || cell == "."; }

const std::string& cell_at(const CsvTable& t, std::size_t row, int col, const std::string& name) {
  const auto& cell = t.rows[row][col];
  if (is_missing(cell)) throw Error(ErrorCode::InvalidArgument, "missing value in " + where(name, row));
  return cell;
}

int parse_int_cell(const CsvTable& t, std::size_t row, int col, const std::string& name) {
  const auto& cell = cell_at(t, row, col, name);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw Error(ErrorCode::ParseError, "non-integer value '" + cell + "' in " + where(name, row));
  return v;
}

double parse_real_cell(const CsvTable& t, std::size_t row, int col, const std::string& name) {
  const auto& cell = cell_at(t, row, col, name);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw Error(ErrorCode::ParseError, "non-numeric value '" + cell + "' in " + where(name, row));
  return v;
}

}  // namespace

IngestResult ingest_table(const CsvTable& table, const FitRequest& req) {
  const bool survival_columns = !req.time_column.empty() || !req.event_column.empty();
  std::string family = req.family;
  if (family != "auto" && family != "continuous" && family != "binary" && family != "survival")
    throw Error(ErrorCode::InvalidArgument, "unknown family '" + family + "'");
  if (survival_columns) {
    if (req.time_column.empty() || req.event_column.empty())
      throw Error(ErrorCode::InvalidArgument, "survival outcomes need both a time and an event column");
    if (!req.outcome_column.empty())
      throw Error(ErrorCode::InvalidArgument, "give either an outcome column or time and event columns");
    if (family == "auto") family = "survival";
    if (family != "survival")
      throw Error(ErrorCode::InvalidArgument, "time and event columns imply the survival family");
  } else {
    if (req.outcome_column.empty()) throw Error(ErrorCode::InvalidArgument, "no outcome column given");
    if (family == "survival") throw Error(ErrorCode::InvalidArgument, "survival family needs --time and --event");
  }
  if (table.rows.empty()) throw Error(ErrorCode::InsufficientData, "input has no data rows");
  const std::size_t n = table.rows.size();

  std::vector<std::string> used;
  OutcomeData outcome;
  if (survival_columns) {
    const int tc = table.column(req.time_column);
    const int ec = table.column(req.event_column);
    used = {req.time_column, req.event_column};
    SurvivalOutcome s;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = parse_real_cell(table, i, tc, req.time_column);
      if (!(t > 0.0))
        throw Error(ErrorCode::InvalidArgument, "survival time must be positive in " + where(req.time_column, i));
      const int e = parse_int_cell(table, i, ec, req.event_column);
      if (e != 0 && e != 1)
        throw Error(ErrorCode::InvalidArgument, "event indicator must be 0 or 1 in " + where(req.event_column, i));
      s.time.push_back(t);
      s.event.push_back(e);
    }
    outcome = std::move(s);
  } else {
    const int oc = table.column(req.outcome_column);
    used = {req.outcome_column};
    std::vector<double> y;
    bool zero_one = true;
    for (std::size_t i = 0; i < n; ++i) {
      y.push_back(parse_real_cell(table, i, oc, req.outcome_column));
      zero_one = zero_one && (y.back() == 0.0 || y.back() == 1.0);
    }
    if (family == "auto") family = zero_one ? "binary" : "continuous";
    if (family == "binary") {
      BinaryOutcome b;
      for (std::size_t i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
          throw Error(ErrorCode::InvalidArgument, "binary outcome must be 0 or 1 in " + where(req.outcome_column, i));
        b.y.push_back(static_cast<int>(y[i]));
      }
      outcome = std::move(b);
    } else {
      outcome = ContinuousOutcome{std::move(y)};
    }
  }

  std::vector<std::string> names = req.predictors;
  if (names.empty()) {
    for (const auto& h : table.header) {
      if (std::find(used.begin(), used.end(), h) == used.end()) names.push_back(h);
    }
  }
  if (names.empty()) throw Error(ErrorCode::InvalidArgument, "no predictor columns");

  std::vector<std::vector<int>> columns;
  std::vector<Recoding> recodings;
  for (const auto& name : names) {
    if (std::find(used.begin(), used.end(), name) != used.end())
      throw Error(ErrorCode::InvalidArgument, "column '" + name + "' is both outcome and predictor");
    const int c = table.column(name);
    std::vector<int> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = parse_int_cell(table, i, c, name);
    std::map<int, int> levels;
    for (int v : raw) levels.emplace(v, 0);
    int rank = 0;
    bool consecutive = true;
    for (auto& [value, level] : levels) {
      level = rank;
      consecutive = consecutive && value == rank;
      ++rank;
    }
    if (!consecutive) {
      Recoding rec{name, {}};
      for (const auto& [value, level] : levels) rec.mapping.emplace_back(value, level);
      recodings.push_back(std::move(rec));
      for (int& v : raw) v = levels[v];
    }
    columns.push_back(std::move(raw));
  }

  OrdinalDesign design = OrdinalDesign::from_columns(std::move(columns), req.min_cell, names);
  validate_outcome(outcome, design.n());
  return IngestResult{std::move(design), std::move(outcome), std::move(recodings)};
}

IngestResult ingest_csv(const std::string& path, const FitRequest& request) {
  const CsvTable table = read_csv_file(path);
  try {
    return ingest_table(table, request);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

void write_recoding_csv(const std::vector<Recoding>& recodings, std::ostream& os) {
  write_csv_row(os, {"column", "raw_value", "level"});
  for (const auto& rec : recodings) {
    for (const auto& [raw, level] : rec.mapping) write_csv_row(os, {rec.column, std::to_string(raw), std::to_string(level)});
  }
}

}  // namespace ordmix
