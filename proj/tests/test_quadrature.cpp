#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlcap/error.hpp"
#include "nlcap/quadrature.hpp"

using nlcap::quad::gauss_kronrod;

TEST_CASE("gauss_kronrod integrates smooth functions to tolerance") {
  auto r = gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-13));
  CHECK(r.error < 1e-11);
}

TEST_CASE("gauss_kronrod handles the (sin x)^s endpoint behaviour") {
  // int_0^pi (sin x)^s dx = sqrt(pi) Gamma((s+1)/2) / Gamma(s/2 + 1)
  for (double s : {0.01, 0.5, 0.99}) {
    const double exact = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (s + 1.0)) / std::tgamma(0.5 * s + 1.0);
    auto r = gauss_kronrod([s](double x) { return std::pow(std::sin(x), s); }, 0.0, std::numbers::pi);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("gauss_kronrod with breakpoints matches the split sum") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  std::vector<double> pts{0.0, 0.3, 1.0};
  CHECK(gauss_kronrod(f, pts).value == doctest::Approx(0.045 + 0.245).epsilon(1e-14));
}

TEST_CASE("gauss_kronrod reports non-convergence") {
  nlcap::quad::AdaptiveOptions opts;
  opts.max_intervals = 3;
  CHECK_THROWS_AS(gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opts),
                  nlcap::NumericalError);
}

TEST_CASE("gauss_legendre is exact for polynomials of degree 2n-1") {
  auto rule = nlcap::quad::gauss_legendre(5);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(nlcap::quad::apply(rule, [](double x) { return std::pow(x, 9) + x * x; }, -1.0, 2.0) ==
        doctest::Approx((std::pow(2.0, 10) - 1.0) / 10.0 + 3.0).epsilon(1e-13));
}
