#pragma once

// Reference computations that share no code with the library's quadrature.

#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Monte-Carlo estimate of the integral of s(1-s) |z|^{-(2+s)} over the
/// halfplane {z_2 >= d}, with z_2 drawn from a Pareto law and z_1 | z_2 from
/// a Cauchy law. Returns {mean, standard error}.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};
Estimate mc_halfspace(double s, double d, long samples, std::uint64_t seed);

/// Planar curvature of the wedge {y_2 > 0, polar angle < theta} at
/// v = (cos theta, sin theta), by exact radial integration along rays from v
/// with the ball B_eps(v) removed and a midpoint rule in the ray angle.
/// `profile` takes the ray angle.
double wedge_nmc_rays(double s, double theta, double eps, int angles,
                      const std::function<double(double)>& profile = {});

/// Integral of s(1-s)|z|^{-(2+s)} over the halfplane below a point at height
/// d, by the same ray reduction (midpoint rule in the ray angle).
double halfplane_exterior_rays(double s, double d, int angles);

/// Root in theta of wedge_nmc_rays + (sigma - 1) halfplane_exterior_rays for
/// the isotropic planar kernel, by bisection on (lo, hi).
double young_angle_rays(double s, double sigma, double lo, double hi, int angles);

/// Reduced profile of a = 1 + e w_1^2 in R^3 at plane angle alpha, closed form.
double reduced_ellipse_n3(double s, double e, double alpha);
/// Reduced profile of the constant profile 1 in R^n, closed form.
double reduced_isotropic(int n, double s);

/// Composite Simpson rule with `intervals` (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals);

/// Root of F(theta) = (1 + sigma)/2 F(pi) for F(theta) = int_0^theta a(t) sin(t)^s dt,
/// by Simpson tabulation and bisection.
double young_angle_simpson(double s, double sigma, const std::function<double(double)>& a_star, int intervals);

/// Grid argmin of the classical cap energy over theta in (0, pi).
double cap_energy_argmin(double m, double sigma, double step);

/// Continuum interaction of a planar cell set E (unit cells of side h) with
/// the target region, for the isotropic kernel s(1-s)|z|^{-(2+s)}. Target
/// cells are given by a mask over the box; `beyond_box` returns the
/// integral of r^{-1-s} along a ray from the box exit point to infinity,
/// restricted to the target region outside the box.
struct RayScene {
  int width = 0;
  int height = 0;
  double h = 1.0;
  std::vector<std::uint8_t> source;  // cells of E
  std::vector<std::uint8_t> target;  // cells of the partner set inside the box
  std::function<double(double px, double py, double cx, double cy, double t_exit)> beyond_box;
};
/// Source points: tensor Gauss-Legendre nodes per cell under a map that
/// clusters them toward the cell edges. Ray angles: midpoint rule with a
/// per-point rotation.
double continuum_interaction(const RayScene& scene, double s, int nodes_per_axis, int angles);

}  // namespace oracle
