#include "schemacalc/error.hpp"

namespace schemacalc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedType: return "MalformedType";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::NotPredictive: return "NotPredictive";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::UnboundAtomic: return "UnboundAtomic";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnresolvedTarget: return "UnresolvedTarget";
    case ErrorCode::OverlappingParTargets: return "OverlappingParTargets";
    case ErrorCode::SignatureViolation: return "SignatureViolation";
    case ErrorCode::UnknownSchema: return "UnknownSchema";
    case ErrorCode::UnknownMemory: return "UnknownMemory";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::InconsistentInstance: return "InconsistentInstance";
    case ErrorCode::NonNumericAggregate: return "NonNumericAggregate";
    case ErrorCode::OverlapConflict: return "OverlapConflict";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownValue: return "UnknownValue";
    case ErrorCode::CycleCreated: return "CycleCreated";
    case ErrorCode::EdgeAbsent: return "EdgeAbsent";
    case ErrorCode::EdgePresent: return "EdgePresent";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace schemacalc
