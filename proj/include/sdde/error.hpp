#pragma once

#include <stdexcept>
#include <string>

namespace sdde {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (bad grid, wrong regime, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed on valid inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidGrid : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedRegime : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidPhase : public DomainError {
 public:
  using DomainError::DomainError;
};

class KernelTooShort : public DomainError {
 public:
  using DomainError::DomainError;
};

class MissingIncrements : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonpositiveInformation : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptySample : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sdde
