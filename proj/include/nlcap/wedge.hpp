#pragma once

#include <optional>
#include <string_view>

#include "nlcap/kernel.hpp"

namespace nlcap {

/// Wedge cone H ∩ V in the (e_1, e_n) plane.
///
/// H = {y_n > 0} is the container halfspace and V the droplet halfspace whose
/// boundary makes the angle `theta` with the wall; the droplet occupies polar
/// angles (0, theta). Evaluation happens at v = rho (cos theta, sin theta),
/// the point of (∂V) ∩ H at distance rho from the apex.
struct WedgeGeometry {
  int n = 2;
  double theta = 0.0;
  double rho = 1.0;
};

/// Planar (dimensionally reduced) form of a kernel: K* restricted to the
/// wedge plane, a_star(alpha) normalization / |z|^{2+s}.
class PlanarKernel {
 public:
  explicit PlanarKernel(const FractionalKernel& kernel);

  double exponent() const noexcept { return s_; }
  double normalization() const noexcept { return normalization_; }
  const ReducedProfile& profile() const noexcept { return profile_; }

  /// Integral of a_star (sin alpha)^s over [lo, hi].
  double angular(double lo, double hi) const;
  /// Same over [0, pi], cached.
  double angular_total() const noexcept { return total_; }

 private:
  double s_;
  double normalization_;
  ReducedProfile profile_;
  double total_;
};

/// Nonlocal mean curvature of the wedge H ∩ V at v (principal value).
double wedge_nmc(const FractionalKernel& kernel, const WedgeGeometry& geom);
double wedge_nmc(const PlanarKernel& kernel, const WedgeGeometry& geom);

/// Integral of K over R^n \ H seen from the wedge evaluation point v.
double wedge_exterior_integral(const PlanarKernel& kernel, const WedgeGeometry& geom);

/// Input to the nonlocal Young's law. `kernel1` carries the liquid-gas
/// interaction, `kernel2` the liquid-solid one.
class ContactAngleProblem {
 public:
  static ContactAngleProblem single(FractionalKernel kernel, double sigma);
  static ContactAngleProblem two_kernel(FractionalKernel kernel1, FractionalKernel kernel2, double sigma);

  const FractionalKernel& kernel1() const noexcept { return k1_; }
  const FractionalKernel& kernel2() const noexcept { return k2_; }
  double sigma() const noexcept { return sigma_; }
  bool is_single_kernel() const noexcept { return single_; }
  int dim() const noexcept { return k1_.dim(); }

  ContactAngleProblem with_sigma(double sigma) const;

 private:
  ContactAngleProblem(FractionalKernel k1, FractionalKernel k2, double sigma, bool single);

  FractionalKernel k1_;
  FractionalKernel k2_;
  double sigma_;
  bool single_;
};

enum class Regime { degenerate_zero, degenerate_pi, interior, outside_threshold };

std::string_view to_string(Regime regime);

struct AngleSolution {
  Regime regime = Regime::interior;
  std::optional<double> theta;
  double residual = 0.0;
  int bracket_iterations = 0;
};

/// Prepared Young's law residual; builds the reduced profiles once.
///
/// residual(theta) = H^{K1*}_{H∩V}(v) - ∫_{R^n\H} K1* + c ∫_{R^n\H} K2*, with
/// c = sigma, except that c = 0 when K2 is ineffective (s1 > s2, or sigma = 0
/// with unequal exponents). The residual decreases strictly in theta.
class YoungEquation {
 public:
  explicit YoungEquation(const ContactAngleProblem& problem);

  double residual(double theta, double rho = 1.0) const;
  double sigma() const noexcept { return sigma_; }
  double effective_sigma() const noexcept { return effective_sigma_; }
  const PlanarKernel& liquid_gas() const noexcept { return k1_; }
  const PlanarKernel& liquid_solid() const noexcept { return k2_; }

 private:
  PlanarKernel k1_;
  PlanarKernel k2_;
  double sigma_;
  double effective_sigma_;
};

double young_residual(const ContactAngleProblem& problem, double theta, double rho = 1.0);

/// Ratio of the a_star (sin alpha)^s moments of the two kernels; requires s1 = s2.
double sigma_threshold(const ContactAngleProblem& problem);

Regime classify_regime(const ContactAngleProblem& problem);

struct SolverOptions {
  double tol = 1e-6;
  double rho = 1.0;
  double theta_min = 1e-3;
  int scan_points = 64;
};

AngleSolution solve_contact_angle(const ContactAngleProblem& problem, const SolverOptions& opts = {});

}  // namespace nlcap
