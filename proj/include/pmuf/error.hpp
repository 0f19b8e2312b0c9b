#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmuf {

/// Failure categories raised by the library. The integer values are part of
/// the C API (see pmuf.h) and must not be renumbered.
enum class ErrorCode : int {
  InvalidArgument = 1,
  EmptySeries = 2,
  InvalidSpec = 3,
  OrderTooLarge = 4,
  DegenerateSignal = 5,
  WindowTooLarge = 6,
  ConstantSeries = 7,
  WrongKind = 8,
  TooShort = 9,
  TooFewSamples = 10,
  NumericalFailure = 11,
  AboveNyquist = 12,
  DegenerateBaseline = 13,
  InfeasiblePlacement = 14,
  OutOfRange = 15,
  ParseError = 16,
  RaggedRow = 17,
  NonUniformTimestamps = 18,
  MixedRates = 19,
  SchemaError = 20,
  IoError = 21,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace pmuf
