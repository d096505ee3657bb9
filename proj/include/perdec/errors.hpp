#pragma once

#include <stdexcept>
#include <string>

namespace perdec {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (non-finite entries, dimension
/// mismatch, bad JSON structure, nonpositive period, ...).
struct InvalidInput : Error {
  using Error::Error;
};

/// An iterative numerical routine failed to deliver its contract.
struct NumericalFailure : Error {
  using Error::Error;
};

/// A theorem hypothesis required by the requested operation does not hold
/// (operator not power-bounded, semigroup not bounded, ...).
struct HypothesisViolation : Error {
  using Error::Error;
};

/// ker(T-I) and ran(T-I) do not span the space; the algebraic mean ergodic
/// projection does not exist. Signals non-power-bounded input.
struct SplittingNotDirect : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

/// Cesaro averages failed their convergence certificate.
struct DivergenceError : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

/// Requested matrix exponential exceeds the scaling budget.
struct ScaleLimit : Error {
  using Error::Error;
};

/// The generator is not periodic with the stated period.
struct NotPeriodic : Error {
  using Error::Error;
};

/// A stated precondition failed; carries the measured defect.
struct PreconditionViolation : Error {
  double defect;
  explicit PreconditionViolation(const std::string& what, double defect_value)
      : Error(what), defect(defect_value) {}
};

/// Certificate digest does not match the inputs it claims to certify.
struct TamperError : Error {
  using Error::Error;
};

/// Structural JSON validation failure; carries the path of the violation.
struct SchemaError : InvalidInput {
  std::string path;
  SchemaError(const std::string& json_path, const std::string& message)
      : InvalidInput(json_path + ": " + message), path(json_path) {}
};

}  // namespace perdec
