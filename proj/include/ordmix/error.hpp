#pragma once

#include <stdexcept>
#include <string>

namespace ordmix {

enum class ErrorCode {
  ConstantColumn,
  InsufficientData,
  NoAdmissibleCutoff,
  DimensionMismatch,
  InvalidArgument,
  NumericalError,
  InsufficientChains,
  EmptyDraws,
  TooManyConfigurations,
  UnsupportedPenalty,
  InvalidCorrelation,
  MissingColumn,
  ParseError,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Validation errors map to CLI exit status 1, the rest to 2.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace ordmix
