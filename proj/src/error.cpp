#include "tte/error.hpp"

namespace tte {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CycleDetected: return "CYCLE_DETECTED";
    case ErrorCode::UnknownNode: return "UNKNOWN_NODE";
    case ErrorCode::SelfLoop: return "SELF_LOOP";
    case ErrorCode::OverlappingSets: return "OVERLAPPING_SETS";
    case ErrorCode::InvalidHorizon: return "INVALID_HORIZON";
    case ErrorCode::PeriodOutOfRange: return "PERIOD_OUT_OF_RANGE";
    case ErrorCode::RegimeOutOfRange: return "REGIME_OUT_OF_RANGE";
    case ErrorCode::SupportTooLarge: return "SUPPORT_TOO_LARGE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::EmptyStratum: return "EMPTY_STRATUM";
    case ErrorCode::NoAtRiskRows: return "NO_AT_RISK_ROWS";
    case ErrorCode::AllReplicatesFailed: return "ALL_REPLICATES_FAILED";
  }
  return "UNKNOWN";
}

bool is_estimation_failure(ErrorCode code) noexcept {
  return code == ErrorCode::EmptyStratum || code == ErrorCode::NoAtRiskRows ||
         code == ErrorCode::AllReplicatesFailed;
}

}  // namespace tte
