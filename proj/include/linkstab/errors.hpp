#pragma once

#include <stdexcept>
#include <string>

namespace linkstab {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A quadrature or series evaluation failed to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Covariance too close to singular to invert reliably.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ratio whose denominator vanishes (e.g. a link state with ~zero
// steady-state probability, or zero mutual information).
class UndefinedRatioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Monte Carlo run that observed too few samples of a conditioning state.
class InsufficientCountError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linkstab
