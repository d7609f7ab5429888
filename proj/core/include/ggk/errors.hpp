#pragma once

#include <stdexcept>
#include <string>

namespace ggk {

enum class ErrorCode {
  BadParameters,
  DuplicateUnit,
  UnequalClassWeights,
  NotAGroup,
  NotAField,
  NotFull,
  NotABisection,
  TooManyBisections,
  NullSet,
  GroupoidMismatch,
  NonSymmetric,
  NotProbabilityMeasure,
  NoConvergence,
  BallTooLarge,
  EmptyUnion,
  TooShort,
  ParseError,
  Unsupported,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

// Iterative norm estimation ran out of iterations; carries the best lower bound.
class NoConvergence : public Error {
public:
  NoConvergence(std::string message, double best_lower_bound, long iterations)
      : Error(ErrorCode::NoConvergence, std::move(message)),
        best_lower_bound_(best_lower_bound), iterations_(iterations) {}
  double best_lower_bound() const { return best_lower_bound_; }
  long iterations() const { return iterations_; }

private:
  double best_lower_bound_;
  long iterations_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

} // namespace ggk
