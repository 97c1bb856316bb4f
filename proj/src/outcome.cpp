#include "ordmix/outcome.hpp"

#include <cmath>

#include "ordmix/error.hpp"

namespace ordmix {

OutcomeKind kind_of(const OutcomeData& outcome) {
  return std::visit(
      [](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ContinuousOutcome>) return OutcomeKind::Continuous;
        else if constexpr (std::is_same_v<T, BinaryOutcome>) return OutcomeKind::Binary;
        else return OutcomeKind::Survival;
      },
      outcome);
}

const char* to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Continuous: return "continuous";
    case OutcomeKind::Binary: return "binary";
    case OutcomeKind::Survival: return "survival";
  }
  return "unknown";
}

OutcomeKind parse_outcome_kind(const std::string& text) {
  if (text == "continuous" || text == "linear") return OutcomeKind::Continuous;
  if (text == "binary" || text == "logistic") return OutcomeKind::Binary;
  if (text == "survival") return OutcomeKind::Survival;
  throw Error(ErrorCode::InvalidArgument, "unknown outcome kind '" + text + "'");
}

void validate_outcome(const OutcomeData& outcome, int n) {
  auto check_len = [n](std::size_t len) {
    if (static_cast<int>(len) != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "outcome length " + std::to_string(len) + " does not match n = " + std::to_string(n));
  };
  if (const auto* c = std::get_if<ContinuousOutcome>(&outcome)) {
    check_len(c->y.size());
    for (std::size_t i = 0; i < c->y.size(); ++i) {
      if (!std::isfinite(c->y[i]))
        throw Error(ErrorCode::InvalidArgument, "non-finite outcome on row " + std::to_string(i + 1));
    }
  } else if (const auto* b = std::get_if<BinaryOutcome>(&outcome)) {
    check_len(b->y.size());
    for (std::size_t i = 0; i < b->y.size(); ++i) {
      if (b->y[i] != 0 && b->y[i] != 1)
        throw Error(ErrorCode::InvalidArgument, "binary outcome must be 0/1 on row " + std::to_string(i + 1));
    }
  } else {
    const auto& s = std::get<SurvivalOutcome>(outcome);
    check_len(s.time.size());
    check_len(s.event.size());
    for (std::size_t i = 0; i < s.time.size(); ++i) {
      if (!(s.time[i] > 0.0) || !std::isfinite(s.time[i]))
        throw Error(ErrorCode::InvalidArgument, "survival time must be positive on row " + std::to_string(i + 1));
      if (s.event[i] != 0 && s.event[i] != 1)
        throw Error(ErrorCode::InvalidArgument, "event indicator must be 0/1 on row " + std::to_string(i + 1));
    }
  }
}

}  // namespace ordmix
