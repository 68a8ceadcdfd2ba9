#include "socmarket/error.hpp"

namespace socmarket {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::SpreadViolation: return "SpreadViolation";
    case ErrorCode::BreakpointViolation: return "BreakpointViolation";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InconsistentTrajectory: return "InconsistentTrajectory";
    case ErrorCode::InfeasiblePath: return "InfeasiblePath";
    case ErrorCode::NoFeasibleTrajectory: return "NoFeasibleTrajectory";
    case ErrorCode::NonEdcrBid: return "NonEdcrBid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
  }
  return "Unknown";
}

}  // namespace socmarket
