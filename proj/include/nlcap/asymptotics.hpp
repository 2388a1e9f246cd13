#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlcap/kernel.hpp"
#include "nlcap/wedge.hpp"

namespace nlcap {

struct CapEnergyQuery {
  double m = 1.0;
  double sigma = 0.0;
  double theta = 0.0;
};

/// Perimeter plus sigma times wetted length of the circular segment of area
/// m meeting a straight wall at angle theta.
double classical_cap_energy(const CapEnergyQuery& q);

/// Young's law angle arccos(-sigma).
double classical_young(double sigma);

/// Angle solver for a given (s, sigma). Must be safe to call concurrently.
using AngleSolver = std::function<AngleSolution(double s, double sigma)>;

/// Single-kernel solver with the given dimension and profile.
AngleSolver make_angle_solver(int n = 2, AngularProfile profile = AngularProfile::constant(),
                              SolverOptions opts = {});

enum class LimitEnd { s_to_one, s_to_zero };

struct AsymptoticFit {
  double sigma = 0.0;
  LimitEnd end = LimitEnd::s_to_one;
  /// theta ~ intercept - x * slope with x = 1 - s or x = s.
  double slope = 0.0;
  double intercept = 0.0;
  /// intercept minus arccos(-sigma) or (pi/2)(1 + sigma).
  double intercept_check = 0.0;
  double fit_residual = 0.0;
  std::vector<std::pair<double, double>> samples;  // (s, theta)
};

/// Sample grids used by estimate_slope.
std::vector<double> slope_samples(LimitEnd end);

AsymptoticFit estimate_slope(double sigma, LimitEnd end, const AngleSolver& solver);

struct SweepRow {
  double s = 0.0;
  double sigma = 0.0;
  std::optional<double> theta;
  double residual = 0.0;
  std::string error;  // empty on success
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// Thread count for sweeps: NLCAP_THREADS when set and positive, else the
/// hardware concurrency.
unsigned sweep_threads();

/// Every (s, sigma) pair, rows sorted by (s, sigma). Failures are kept in the
/// row instead of propagating.
SweepTable sweep(std::span<const double> s_values, std::span<const double> sigma_values, const AngleSolver& solver,
                 unsigned threads = 0);

/// CSV `s,sigma,theta,residual`; failed rows print `nan`.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace nlcap
