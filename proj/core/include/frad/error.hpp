#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frad {

/// Fine-grained error codes. Each maps onto one of the coarse exit categories
/// reported by the command-line tool.
enum class ErrorCode : std::uint8_t {
  InvalidArgument,
  InvalidLabel,
  UnknownLabel,
  MissingFile,
  Unwritable,
  MalformedRow,
  NonFiniteField,
  SchemaMismatch,
  ShapeMismatch,
  EmptyInput,
  NegativeHessian,
  OutOfDomain,
  NumericalFailure,
  ObjectiveFailure,
};

enum class ErrorCategory : std::uint8_t { Usage = 1, Io = 2, Schema = 3, Numeric = 4 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// 1-based data row (header excluded) for file-parsing errors.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace frad
