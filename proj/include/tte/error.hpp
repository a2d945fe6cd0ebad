#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tte {

enum class ErrorCode {
  CycleDetected,
  UnknownNode,
  SelfLoop,
  OverlappingSets,
  InvalidHorizon,
  PeriodOutOfRange,
  RegimeOutOfRange,
  SupportTooLarge,
  InvalidArgument,
  ParseError,
  IoError,
  // estimation failures: the data cannot support the requested estimand
  EmptyStratum,
  NoAtRiskRows,
  AllReplicatesFailed,
};

/// Stable upper-snake name used in CLI diagnostics, e.g. "EMPTY_STRATUM".
std::string_view error_code_name(ErrorCode code) noexcept;

/// True for errors caused by the sample rather than by the caller's input.
bool is_estimation_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tte
