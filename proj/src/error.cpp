#include "pmuf/error.hpp"

namespace pmuf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::AboveNyquist: return "AboveNyquist";
    case ErrorCode::DegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::InfeasiblePlacement: return "InfeasiblePlacement";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonUniformTimestamps: return "NonUniformTimestamps";
    case ErrorCode::MixedRates: return "MixedRates";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pmuf
