#pragma once

#include <stdexcept>
#include <string>

namespace pcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input (definition documents, function specs, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A domain invariant does not hold (harmonic structure, measure weights, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Linear solve, factorization or eigensolver failure.
class SolveError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcf
