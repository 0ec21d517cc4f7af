#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gradecast {

enum class ErrorKind {
  // input / data errors
  MissingColumn,
  OutOfScaleValue,
  NonNumericCell,
  EmptyDataset,
  WrongGranularity,
  MissingFeature,
  DimensionMismatch,
  InvalidArgument,
  ParseError,
  UnknownModel,
  // computation errors
  DegenerateFeature,
  TooFewSamples,
  NonFiniteInput,
  SingularClassModel,
  InvalidPartition,
  EmptyInput,
  EmptyPairs,
  ZeroDenominator,
};

std::string_view to_string(ErrorKind kind);

// True for kinds caused by malformed or incomplete input rather than by the
// numerical work done on it. The CLI maps these to exit code 2, the rest to 3.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  Error(ErrorKind kind, const std::string& message, std::size_t row, std::string column);

  ErrorKind kind() const noexcept { return kind_; }
  // 1-based data row (header excluded), when the error refers to a CSV cell.
  std::optional<std::size_t> row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> row_;
  std::string column_;
};

}  // namespace gradecast
