#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hettrans {

enum class ErrorCode {
  InvalidArgument,
  DensityTooSmall,
  QuantileNotBracketed,
  DegenerateSample,
  AllPointsDegenerate,
  OutOfRange,
  SingularityInRange,
  NoRoot,
  BadAnchors,
  DivisionByZero,
  DegenerateDenominator,
  EmptyRegion,
  AllDegenerate,
  CannotSatisfy,
  DegeneratePins,
  UsageError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-readable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the CSV reader. Rows are 1-based file lines (the header is row 1);
/// row 0 means the file had no header at all.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace hettrans
