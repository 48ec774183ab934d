#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schemacalc {

enum class ErrorCode {
  MalformedType,
  NotDecomposable,
  NotPredictive,
  ShapeMismatch,
  NonStochasticRow,
  DomainMismatch,
  UnknownPoint,
  UnsupportedLanguage,
  UnboundAtomic,
  TypeMismatch,
  UnresolvedTarget,
  OverlappingParTargets,
  SignatureViolation,
  UnknownSchema,
  UnknownMemory,
  UnknownModule,
  InconsistentInstance,
  NonNumericAggregate,
  OverlapConflict,
  UnknownVariable,
  UnknownValue,
  CycleCreated,
  EdgeAbsent,
  EdgePresent,
  EmptyDataset,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported through this type;
/// `code()` identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace schemacalc
