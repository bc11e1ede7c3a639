#pragma once

#include <stdexcept>
#include <string>

namespace affdim {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad numbers, non-contracting maps, mismatched lengths,
/// violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A word contains a letter outside 1..m.
class InvalidWord : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An enumeration would exceed its configured size cap.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace affdim
