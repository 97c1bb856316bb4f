#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ordmix/csv.hpp"
#include "ordmix/design.hpp"
#include "ordmix/outcome.hpp"
#include "ordmix/priors.hpp"
#include "ordmix/sampler.hpp"

namespace ordmix {

struct FitRequest {
  std::string input;
  std::string outcome_column;             // continuous or binary response
  std::string time_column;                // survival
  std::string event_column;               // survival
  std::vector<std::string> predictors;    // empty: every column not used by the outcome
  std::string family = "auto";            // auto, continuous, binary or survival
  int min_cell = 5;
  PriorConfig priors;
  ChainConfig chain;
  std::string out_dir = ".";
};

/// Mapping from raw predictor values to consecutive 0-based ranks.
struct Recoding {
  std::string column;
  std::vector<std::pair<int, int>> mapping;  // (raw value, level)
};

struct IngestResult {
  OrdinalDesign design;
  OutcomeData outcome;
  std::vector<Recoding> recodings;  // only columns whose values were not 0..K
};

/// Builds the design and outcome from a parsed table. Family "auto" is
/// survival when time/event columns are named, binary when the outcome holds
/// only 0 and 1, continuous otherwise. Errors name the column and the 1-based
/// data row.
IngestResult ingest_table(const CsvTable& table, const FitRequest& request);
IngestResult ingest_csv(const std::string& path, const FitRequest& request);

/// Sidecar CSV with columns column, raw_value, level.
void write_recoding_csv(const std::vector<Recoding>& recodings, std::ostream& os);

}  // namespace ordmix
