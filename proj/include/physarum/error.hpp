#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace physarum {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteEntry,
  NotSymmetric,
  Breakdown,
  ZeroCostNeedsGamma,
  MissingBound,
  NonPositiveInit,
  LinSolveFailure,
  KernelDegenerate,
  EmptyClass,
  Unreachable,
  TooLarge,
  InfeasibleDetected,
  UnboundedUnsupported,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported with one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace physarum
