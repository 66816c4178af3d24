#include "teleqcp/error.hpp"

namespace teleqcp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::InvalidForModel: return "InvalidForModel";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::ZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
    case ErrorCode::IncompatibleBackend: return "IncompatibleBackend";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::SingularFit: return "SingularFit";
  }
  return "Unknown";
}

}  // namespace teleqcp
