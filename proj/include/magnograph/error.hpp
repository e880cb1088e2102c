#pragma once

#include <stdexcept>
#include <string>

namespace magnograph {

/// Base of every error raised by the library. `exit_code()` is the CLI
/// contract: 2 parse, 3 validation, 4 convergence.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class UnknownVertex : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PotentialDomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Argument outside the domain of a closed-form function (e.g. f_r at s >= 1).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RegimeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Mass of the field is not strictly below mu while a penalty is requested.
class OutsideUMu : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class DivergenceError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

class LeftUMu : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace magnograph
