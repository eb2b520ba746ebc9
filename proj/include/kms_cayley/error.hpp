#pragma once

#include <stdexcept>
#include <string>

namespace kms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well formed but has no answer in the mathematical domain
/// (β below the critical value, endpoint mismatch, lookup outside a ball).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input describes an invalid group or malformed data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this group or oracle.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace kms
