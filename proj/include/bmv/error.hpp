#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bmv {

enum class ErrorCode {
  NonPositiveRate,
  EmptyStageList,
  NonPositiveStageLength,
  StagePowerLengthMismatch,
  NonPositivePower,
  CapOutOfRange,
  ThresholdOutOfRange,
  NonConvergence,
  ResidualTooLarge,
  DivisionByZero,
  RhoUnity,
  NoMassAboveZero,
  LengthMismatch,
  InvalidPolicy,
  HorizonTooShort,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

// Thrown by validate_config; carries every violation found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace bmv
