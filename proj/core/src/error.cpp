#include "frad/error.hpp"

namespace frad {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::Unwritable: return "Unwritable";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NegativeHessian: return "NegativeHessian";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ObjectiveFailure: return "ObjectiveFailure";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile:
    case ErrorCode::Unwritable:
      return ErrorCategory::Io;
    case ErrorCode::InvalidLabel:
    case ErrorCode::UnknownLabel:
    case ErrorCode::MalformedRow:
    case ErrorCode::NonFiniteField:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::ShapeMismatch:
      return ErrorCategory::Schema;
    case ErrorCode::NegativeHessian:
    case ErrorCode::NumericalFailure:
    case ErrorCode::ObjectiveFailure:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Usage;
  }
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> row) {
  std::string out{to_string(code)};
  if (row) out += " at row " + std::to_string(*row);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(decorate(code, message, row)), code_(code), row_(row) {}

}  // namespace frad
