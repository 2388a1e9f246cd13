#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nlcap::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|). Integrable endpoint
/// singularities such as (sin x)^s are handled by repeated bisection toward the
/// endpoint, which gives geometric grading there. Throws NumericalError when
/// max_intervals is exhausted.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const AdaptiveOptions& opts = {});

/// Same, with the interval pre-split at the given interior breakpoints.
Result gauss_kronrod(const std::function<double(double)>& f, std::span<const double> breakpoints,
                     const AdaptiveOptions& opts = {});

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Fixed-rule integral of f over [a, b] using a precomputed Gauss-Legendre rule.
double apply(const Rule& rule, const std::function<double(double)>& f, double a, double b);

}  // namespace nlcap::quad
