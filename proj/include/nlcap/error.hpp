#pragma once

#include <stdexcept>
#include <string>

namespace nlcap {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature or other numerical procedure failed to reach its target.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what), achieved_(achieved_tolerance) {}

  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Root finder could not bracket a root on the interior grid.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual_lo, double residual_hi)
      : std::runtime_error(what), lo_(residual_lo), hi_(residual_hi) {}

  double residual_lo() const noexcept { return lo_; }
  double residual_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace nlcap
