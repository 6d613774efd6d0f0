#pragma once

#include <stdexcept>
#include <string>

namespace rwm {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Family or model parameters outside their declared ranges.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical integral of a density diverged or underflowed.
class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its evaluation budget above tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ESJD argmax on the search grid sits on a boundary.
class NoInteriorMaximum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixing distribution places mass at (or arbitrarily near) zero.
class PointMassAtZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RootRefinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwm
