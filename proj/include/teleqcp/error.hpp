#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teleqcp {

enum class ErrorCode {
  InvalidArgument,
  NoBracket,
  NonConvergence,
  UnsupportedRegime,
  DimensionOverflow,
  QuadratureNonConvergence,
  InvalidForModel,
  NotPositive,
  ZeroProbabilityOutcome,
  IncompatibleBackend,
  SeriesTooShort,
  EmptyWindow,
  InsufficientPoints,
  SingularFit,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` says which contract failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace teleqcp
