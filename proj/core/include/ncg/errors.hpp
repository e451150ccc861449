#pragma once

#include <stdexcept>
#include <string>

namespace ncg {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on truncation, deformation parameter or spinor rank.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A required table or setting is missing (e.g. an uncalibrated ladder table).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller-side contract violated (non-unitary gauge element, non-diagonal state
/// handed to the diagonal solver, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge or a numerical check went out of tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Ladder calibration could not reproduce the index law within tolerance.
class CalibrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ncg
