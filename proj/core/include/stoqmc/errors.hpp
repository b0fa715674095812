#pragma once

#include <stdexcept>
#include <string>

namespace stoqmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed models, out-of-range parameters, violated invariants
/// of user-supplied data. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotStoquasticError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateInstanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A statistical procedure could not certify its own output (e.g. importance
/// weights collapsed on an annealing rung). Exit code 3 in the CLI.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

/// Violation of an internal invariant that valid inputs can never trigger.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace stoqmc
