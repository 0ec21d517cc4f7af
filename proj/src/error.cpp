#include "gradecast/error.hpp"

#include <utility>

namespace gradecast {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::OutOfScaleValue: return "OutOfScaleValue";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::WrongGranularity: return "WrongGranularity";
    case ErrorKind::MissingFeature: return "MissingFeature";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::DegenerateFeature: return "DegenerateFeature";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::SingularClassModel: return "SingularClassModel";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyPairs: return "EmptyPairs";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn:
    case ErrorKind::OutOfScaleValue:
    case ErrorKind::NonNumericCell:
    case ErrorKind::EmptyDataset:
    case ErrorKind::WrongGranularity:
    case ErrorKind::MissingFeature:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::UnknownModel:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, std::size_t row, std::string column)
    : std::runtime_error(message), kind_(kind), row_(row), column_(std::move(column)) {}

}  // namespace gradecast
