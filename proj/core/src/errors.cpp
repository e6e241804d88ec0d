#include "hettrans/errors.hpp"

namespace hettrans {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DensityTooSmall: return "DensityTooSmall";
    case ErrorCode::QuantileNotBracketed: return "QuantileNotBracketed";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::AllPointsDegenerate: return "AllPointsDegenerate";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SingularityInRange: return "SingularityInRange";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::BadAnchors: return "BadAnchors";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::CannotSatisfy: return "CannotSatisfy";
    case ErrorCode::DegeneratePins: return "DegeneratePins";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& what)
    : Error(ErrorCode::ParseError,
            "row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
      row_(row),
      column_(column) {}

}  // namespace hettrans
