#pragma once

#include <stdexcept>
#include <string>

namespace action_rdc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A probability table, cost or distortion table is malformed.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// A scalar argument lies outside the domain where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No distribution satisfies the cost / distortion constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An evaluation, enumeration or scan budget ran out before a usable answer.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace action_rdc
