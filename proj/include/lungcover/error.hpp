#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lungcover {

enum class ErrorCode {
  InvalidArgument,
  MalformedHeader,
  MalformedMask,
  SizeMismatch,
  ValueOutOfRange,
  IoFailure,
  GeometryMismatch,
  EmptyReference,
  BothEmpty,
  EmptyInput,
  LengthMismatch,
  TooFewSamples,
  TooManySamples,
  DegenerateVariance,
  AllZeroDifferences,
  SpecViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported as an Error carrying a code the
/// CLI maps onto its exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lungcover
