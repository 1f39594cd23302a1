#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace classalg {

// Every engine failure carries exactly one of these codes. The service layer
// maps them to ApiError.code strings via to_string().
enum class ErrorCode {
  SyntaxError,
  UnknownOperator,
  UnknownClassName,
  InliningCycle,
  SizeBudgetExceeded,
  UnknownOid,
  EmptyValueList,
  InvalidIdentifier,
  CyclicComposite,
  NameClash,
  DuplicateIntent,
  UnknownRelationName,
  NotExplicit,
  NonNumericAggregate,
  EmptyOidSet,
  UnknownAttribute,
  InconsistentBounds,
  EmptyUniverse,
  InvalidConstraint,
  ForbiddenConstraint,
  Unsatisfiable,
  CascadeViolation,
  ValidationGap,
  DivisionByZero,
  ParseError,
  VersionMismatch,
  IntegrityError,
  Conflict,
  NotFound,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(message), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace classalg
