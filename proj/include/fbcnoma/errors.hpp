#pragma once

#include <stdexcept>
#include <string>

namespace fbcnoma {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method (quadrature refinement, fixed point, root search)
/// failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root bracket whose endpoints do not straddle a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No Lagrange multiplier satisfies the mean-power constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Average transmit power above the configured cap.
class CapViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Queue simulation whose arrivals exceed the empirical mean service.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few exceedance events to fit a tail slope.
class InsufficientEventsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete scenario file / command-line input.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fbcnoma
