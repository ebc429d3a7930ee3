#pragma once

#include <stdexcept>
#include <string>

namespace faltings {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  ok = 0,
  contract = 2,
  numeric = 3,
  integrity = 4,
};

/// A precondition of an operation was violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the upper half-plane was supplied.
class DomainError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// The Weierstrass cubic has a repeated root (4A^3 + 27B^2 = 0).
class SingularCurveError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// The cusp parameter t = -27/4, where j is undefined.
class CuspError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// An iteration failed to converge within its cap.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two computations that must agree did not, or a validated bound was broken.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace faltings
