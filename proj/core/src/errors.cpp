#include "ggk/errors.hpp"

namespace ggk {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::DuplicateUnit: return "DuplicateUnit";
    case ErrorCode::UnequalClassWeights: return "UnequalClassWeights";
    case ErrorCode::NotAGroup: return "NotAGroup";
    case ErrorCode::NotAField: return "NotAField";
    case ErrorCode::NotFull: return "NotFull";
    case ErrorCode::NotABisection: return "NotABisection";
    case ErrorCode::TooManyBisections: return "TooManyBisections";
    case ErrorCode::NullSet: return "NullSet";
    case ErrorCode::GroupoidMismatch: return "GroupoidMismatch";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NotProbabilityMeasure: return "NotProbabilityMeasure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::EmptyUnion: return "EmptyUnion";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

} // namespace ggk
