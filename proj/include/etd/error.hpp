#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace etd {

enum class ErrorCode {
  InvalidDate,
  InvalidIri,
  InvalidLiteral,
  InvalidInterval,
  UnknownProperty,
  KindMismatch,
  InvalidTriple,
  SyntaxError,
  UnknownKey,
  MissingRequiredKey,
  DuplicateLocalId,
  InvalidLocalId,
  DanglingReference,
  NotFound,
  HierarchyCycle,
  NotABody,
  NotAPerson,
  SequenceCycle,
  AmbiguousSuccession,
  ParseError,
  UnboundSelectVariable,
  DanglingContext,
  PortInUse,
  IoError,
};

std::string_view errorCodeName(ErrorCode code);

// All domain failures surface as this exception; `line`/`column` are 0 when
// the failure has no source position.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::size_t line = 0,
        std::size_t column = 0)
      : std::runtime_error(format(code, message, line, column)),
        code_(code),
        detail_(std::move(message)),
        line_(line),
        column_(column) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            std::size_t line, std::size_t column);

  ErrorCode code_;
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace etd
