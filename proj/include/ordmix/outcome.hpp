#pragma once

#include <string>
#include <variant>
#include <vector>

namespace ordmix {

enum class OutcomeKind { Continuous, Binary, Survival };

struct ContinuousOutcome {
  std::vector<double> y;
};

struct BinaryOutcome {
  std::vector<int> y;
};

/// Right-censored times: event[i] = 1 for an observed failure, 0 for censoring.
struct SurvivalOutcome {
  std::vector<double> time;
  std::vector<int> event;
};

using OutcomeData = std::variant<ContinuousOutcome, BinaryOutcome, SurvivalOutcome>;

OutcomeKind kind_of(const OutcomeData& outcome);
const char* to_string(OutcomeKind kind);
OutcomeKind parse_outcome_kind(const std::string& text);

/// Checks length n, finiteness, binary values in {0,1}, positive survival times.
void validate_outcome(const OutcomeData& outcome, int n);

}  // namespace ordmix
