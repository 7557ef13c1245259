#pragma once

#include <stdexcept>

namespace rupture {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration errors (exit code 2 in the CLI).
class ParseError : public Error {
 public:
  using Error::Error;
};
class SchemaError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class SizeError : public Error {
 public:
  using Error::Error;
};
class UnsupportedError : public Error {
 public:
  using Error::Error;
};
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

// Numerical failures (exit code 3 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class EmptyRuptureSetError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class StagnationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A rupture happened outside the distinguished interval (exit code 1).
class ModelViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rupture
