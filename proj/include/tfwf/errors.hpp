#pragma once

#include <stdexcept>
#include <string>

namespace tfwf {

/// Argument outside the mathematical domain of a function (Lambert W, log, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The discretization grid does not cover the decay region of a symbol.
class GridTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver (root finder, quadrature, SVD) failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tfwf
