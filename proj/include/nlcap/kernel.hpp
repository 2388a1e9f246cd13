#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlcap {

/// Even, strictly positive function on the unit sphere S^{n-1}.
///
/// Callers pass unit vectors; the profile does not renormalize.
class AngularProfile {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  AngularProfile(std::string name, Fn fn, bool isotropic);

  /// a(w) = c.
  static AngularProfile constant(double c = 1.0);
  /// a(w) = 1 + e * w_1^2 with e in [0, 1).
  static AngularProfile ellipse(double e);
  /// Parses the built-in names `iso` and `ellipse:<e>`.
  static AngularProfile parse(std::string_view text);

  double operator()(std::span<const double> unit) const { return fn_(unit); }
  const std::string& name() const noexcept { return name_; }
  bool isotropic() const noexcept { return isotropic_; }

 private:
  std::string name_;
  Fn fn_;
  bool isotropic_;
};

/// K(x) = normalization * a(x/|x|) / |x|^{n+s}.
class FractionalKernel {
 public:
  /// Validates 0 < s < 1, n >= 2, and evenness/positivity of the profile on a
  /// deterministic sample grid. Normalization defaults to s(1-s).
  FractionalKernel(int n, double s, AngularProfile profile = AngularProfile::constant(),
                   std::optional<double> normalization = std::nullopt);

  int dim() const noexcept { return n_; }
  double exponent() const noexcept { return s_; }
  double normalization() const noexcept { return normalization_; }
  const AngularProfile& profile() const noexcept { return profile_; }

  /// Throws DomainError at the origin or on a dimension mismatch.
  double operator()(std::span<const double> x) const;

 private:
  int n_;
  double s_;
  double normalization_;
  AngularProfile profile_;
};

double eval_kernel(const FractionalKernel& kernel, std::span<const double> x);

/// Deterministic sample of unit vectors on S^{n-1} used for structural checks.
std::vector<std::vector<double>> sphere_samples(int n, int count);

struct KernelBounds {
  double lambda = 1.0;
  double rho0 = 1.0;
};

/// Outcome of the comparability check. Each ratio is the worst observed
/// (actual / allowed); values above 1 (beyond round-off) are violations.
struct BoundsReport {
  bool pass = true;
  double worst_ratio = 0.0;
  double upper_ratio = 0.0;
  double lower_ratio = 0.0;
  double gradient_ratio = 0.0;
  int samples = 0;
};

BoundsReport check_bounds(const FractionalKernel& kernel, const KernelBounds& bounds, int sample_count);

/// Central-difference gradient magnitude with step 1e-5 |x|.
double kernel_gradient_norm(const FractionalKernel& kernel, std::span<const double> x);

/// Angular profile collapsed to the plane spanned by e_1 and e_n.
///
/// Tabulated on a uniform grid of the angle alpha in [0, 2 pi), where alpha
/// parametrizes (cos alpha) e_1 + (sin alpha) e_n. For n = 2 evaluation goes
/// straight to the original profile.
class ReducedProfile {
 public:
  static constexpr int kGridSize = 512;

  ReducedProfile(double s, std::vector<double> table, std::optional<AngularProfile> exact = std::nullopt);

  double exponent() const noexcept { return s_; }
  /// Value at angle alpha (any real; reduced mod 2 pi).
  double operator()(double alpha) const;
  std::span<const double> table() const noexcept { return table_; }
  /// True when evaluation interpolates the table (n >= 3).
  bool tabulated() const noexcept { return !exact_; }

 private:
  double s_;
  std::vector<double> table_;
  std::optional<AngularProfile> exact_;
};

ReducedProfile reduce_profile(const FractionalKernel& kernel);

/// Integral over alpha in [lo, hi] of a_star(alpha) (sin alpha)^s.
double weighted_profile_integral(const ReducedProfile& profile, double lo, double hi);

/// Integral of K(v - y) over the closed halfspace {y_n <= 0} for a point v at
/// height d > 0. Scales exactly as d^{-s}.
double halfspace_exterior_integral(const FractionalKernel& kernel, double d);
double halfspace_exterior_integral(const FractionalKernel& kernel, const ReducedProfile& reduced, double d);

}  // namespace nlcap
