#include "nlcap/wedge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlcap/error.hpp"

namespace nlcap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_interior(const WedgeGeometry& geom) {
  if (!(geom.theta > 0.0 && geom.theta < kPi)) throw DomainError("wedge angle must lie in (0, pi)");
  if (!(geom.rho > 0.0)) throw DomainError("evaluation distance rho must be positive");
}

}  // namespace

PlanarKernel::PlanarKernel(const FractionalKernel& kernel)
    : s_(kernel.exponent()),
      normalization_(kernel.normalization()),
      profile_(reduce_profile(kernel)),
      total_(weighted_profile_integral(profile_, 0.0, kPi)) {}

double PlanarKernel::angular(double lo, double hi) const { return weighted_profile_integral(profile_, lo, hi); }

// Subtracting the tangent halfplane V (zero curvature at v by antipodal
// symmetry) leaves H_{H∩V}(v) = 2 ∫_{V\H} K(v - y) dy. Every ray from v into
// V\H stays on one side of ∂V, so the radial integral is closed form:
//   ∫_{t0}^∞ t^{-1-s} dt = t0^{-s}/s,  t0 = d / sin(alpha),
// with alpha ∈ (theta, pi) the ray angle folded by evenness of a_star.
double wedge_nmc(const PlanarKernel& kernel, const WedgeGeometry& geom) {
  require_interior(geom);
  const double s = kernel.exponent();
  const double d = geom.rho * std::sin(geom.theta);
  return 2.0 * kernel.normalization() / s * std::pow(d, -s) * kernel.angular(geom.theta, kPi);
}

double wedge_nmc(const FractionalKernel& kernel, const WedgeGeometry& geom) {
  require_interior(geom);
  if (geom.n != kernel.dim()) throw DomainError("wedge dimension does not match kernel dimension");
  return wedge_nmc(PlanarKernel(kernel), geom);
}

double wedge_exterior_integral(const PlanarKernel& kernel, const WedgeGeometry& geom) {
  require_interior(geom);
  const double s = kernel.exponent();
  const double d = geom.rho * std::sin(geom.theta);
  return kernel.normalization() / s * std::pow(d, -s) * kernel.angular_total();
}

ContactAngleProblem::ContactAngleProblem(FractionalKernel k1, FractionalKernel k2, double sigma, bool single)
    : k1_(std::move(k1)), k2_(std::move(k2)), sigma_(sigma), single_(single) {
  if (!(std::abs(sigma_) <= 1.0)) throw DomainError("relative adhesion coefficient must lie in [-1, 1]");
  if (k1_.dim() != k2_.dim()) throw DomainError("kernels must share the same dimension");
}

ContactAngleProblem ContactAngleProblem::single(FractionalKernel kernel, double sigma) {
  FractionalKernel copy = kernel;
  return ContactAngleProblem(std::move(kernel), std::move(copy), sigma, true);
}

ContactAngleProblem ContactAngleProblem::two_kernel(FractionalKernel kernel1, FractionalKernel kernel2, double sigma) {
  return ContactAngleProblem(std::move(kernel1), std::move(kernel2), sigma, false);
}

ContactAngleProblem ContactAngleProblem::with_sigma(double sigma) const {
  return ContactAngleProblem(k1_, k2_, sigma, single_);
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::degenerate_zero: return "degenerate_zero";
    case Regime::degenerate_pi: return "degenerate_pi";
    case Regime::interior: return "interior";
    case Regime::outside_threshold: return "outside_threshold";
  }
  return "unknown";
}

namespace {

double blowup_sigma(const ContactAngleProblem& problem) {
  if (problem.is_single_kernel()) return problem.sigma();
  const double s1 = problem.kernel1().exponent();
  const double s2 = problem.kernel2().exponent();
  // K2 drops out of the blow-up equation unless it scales like K1.
  return s1 == s2 ? problem.sigma() : 0.0;
}

}  // namespace

YoungEquation::YoungEquation(const ContactAngleProblem& problem)
    : k1_(problem.kernel1()),
      k2_(problem.is_single_kernel() ? k1_ : PlanarKernel(problem.kernel2())),
      sigma_(problem.sigma()),
      effective_sigma_(blowup_sigma(problem)) {}

double YoungEquation::residual(double theta, double rho) const {
  const WedgeGeometry geom{2, theta, rho};
  double value = wedge_nmc(k1_, geom) - wedge_exterior_integral(k1_, geom);
  if (effective_sigma_ != 0.0) value += effective_sigma_ * wedge_exterior_integral(k2_, geom);
  return value;
}

double young_residual(const ContactAngleProblem& problem, double theta, double rho) {
  return YoungEquation(problem).residual(theta, rho);
}

double sigma_threshold(const ContactAngleProblem& problem) {
  if (problem.kernel1().exponent() != problem.kernel2().exponent())
    throw DomainError("sigma threshold requires equal exponents s1 = s2");
  if (problem.is_single_kernel()) return 1.0;
  const PlanarKernel k1(problem.kernel1());
  const PlanarKernel k2(problem.kernel2());
  return (k1.normalization() * k1.angular_total()) / (k2.normalization() * k2.angular_total());
}

Regime classify_regime(const ContactAngleProblem& problem) {
  const double sigma = problem.sigma();
  if (problem.is_single_kernel()) {
    if (sigma <= -1.0) return Regime::degenerate_zero;
    if (sigma >= 1.0) return Regime::degenerate_pi;
    return Regime::interior;
  }
  const double s1 = problem.kernel1().exponent();
  const double s2 = problem.kernel2().exponent();
  if (sigma == 0.0 || s1 > s2) return Regime::interior;
  if (s1 < s2) return sigma < 0.0 ? Regime::degenerate_zero : Regime::degenerate_pi;
  return std::abs(sigma) < sigma_threshold(problem) ? Regime::interior : Regime::outside_threshold;
}

AngleSolution solve_contact_angle(const ContactAngleProblem& problem, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (opts.scan_points < 2) throw DomainError("solver needs at least two scan points");

  AngleSolution out;
  out.regime = classify_regime(problem);
  switch (out.regime) {
    case Regime::degenerate_zero: out.theta = 0.0; return out;
    case Regime::degenerate_pi: out.theta = kPi; return out;
    case Regime::outside_threshold: return out;
    case Regime::interior: break;
  }

  const YoungEquation equation(problem);
  auto f = [&](double theta) { return equation.residual(theta, opts.rho); };

  const double lo_end = opts.theta_min;
  const double hi_end = kPi - opts.theta_min;
  double a = lo_end;
  double fa = f(a);
  double b = a;
  double fb = fa;
  bool bracketed = fa == 0.0;
  for (int i = 1; i < opts.scan_points && !bracketed; ++i) {
    const double x = lo_end + (hi_end - lo_end) * i / (opts.scan_points - 1);
    const double fx = f(x);
    if (fx == 0.0 || (fx < 0.0) != (fb < 0.0)) {
      a = b, fa = fb;
      b = x, fb = fx;
      bracketed = true;
    } else {
      b = x, fb = fx;
    }
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "no sign change of the Young residual on [" << lo_end << ", " << hi_end << "]: residual "
        << fa << " at the lower end, " << fb << " at the upper end";
    throw SolverError(msg.str(), fa, fb);
  }
  if (fa == 0.0) std::swap(a, b), std::swap(fa, fb);

  // Dekker-style bracketing: secant steps from the best point, falling back to
  // bisection whenever the secant step leaves the bracket or stalls.
  double c = a;
  double fc = fa;
  double step = b - a;
  double prev_step = step;
  int iterations = 0;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  while (fb != 0.0) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a, fc = fa;
      step = prev_step = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b, b = c, c = a;
      fa = fb, fb = fc, fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.25 * opts.tol;
    const double half = 0.5 * (c - b);
    if (std::abs(half) <= tol1) break;

    if (std::abs(prev_step) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double ratio = fb / fa;
      double p = (a - b) * ratio;
      double q = 1.0 - ratio;
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::abs(tol1 * q), std::abs(prev_step * q))) {
        prev_step = step;
        step = p / q;
      } else {
        step = half;
        prev_step = step;
      }
    } else {
      step = half;
      prev_step = step;
    }
    a = b, fa = fb;
    b += std::abs(step) > tol1 ? step : std::copysign(tol1, half);
    fb = f(b);
    ++iterations;
    if (iterations > 500) throw NumericalError("contact angle bracketing did not terminate", std::abs(c - b));
  }

  out.theta = b;
  out.residual = fb;
  out.bracket_iterations = iterations;
  return out;
}

}  // namespace nlcap
