#pragma once

#include <stdexcept>
#include <string>

namespace stba {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched tensor shapes between two operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (dataset bytes, CSV, JSON documents).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Raised by a counted oracle when its query limit has been reached.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Remote scorer failure: connection, status, timeout or protocol violation.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace stba
