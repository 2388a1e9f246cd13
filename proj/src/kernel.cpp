#include "nlcap/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nlcap/error.hpp"
#include "nlcap/quadrature.hpp"

namespace nlcap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kProfileSamples = 256;
constexpr double kEvennessTol = 1e-12;

double norm(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return std::sqrt(sum);
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

AngularProfile::AngularProfile(std::string name, Fn fn, bool isotropic)
    : name_(std::move(name)), fn_(std::move(fn)), isotropic_(isotropic) {}

AngularProfile AngularProfile::constant(double c) {
  if (!(c > 0.0)) throw DomainError("constant profile must be positive");
  std::ostringstream name;
  name << "iso";
  if (c != 1.0) name << "*" << c;
  return AngularProfile(name.str(), [c](std::span<const double>) { return c; }, true);
}

AngularProfile AngularProfile::ellipse(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw DomainError("ellipse parameter must lie in [0, 1)");
  std::ostringstream name;
  name << "ellipse:" << e;
  return AngularProfile(
      name.str(), [e](std::span<const double> w) { return 1.0 + e * w[0] * w[0]; }, e == 0.0);
}

AngularProfile AngularProfile::parse(std::string_view text) {
  if (text == "iso") return constant(1.0);
  constexpr std::string_view prefix = "ellipse:";
  if (text.starts_with(prefix)) {
    const auto body = text.substr(prefix.size());
    double e = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), e);
    if (ec != std::errc() || ptr != body.data() + body.size())
      throw DomainError("malformed ellipse parameter in profile '" + std::string(text) + "'");
    return ellipse(e);
  }
  throw DomainError("unknown profile '" + std::string(text) + "' (expected iso or ellipse:<e>)");
}

std::vector<std::vector<double>> sphere_samples(int n, int count) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = kTwoPi * (k + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  std::mt19937_64 rng(0x5eed5eedULL + static_cast<std::uint64_t>(n));
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> w(n);
    for (int i = 0; i < n; i += 2) {
      // Box-Muller pair
      const double r = std::sqrt(-2.0 * std::log(uniform01(rng)));
      const double t = kTwoPi * uniform01(rng);
      w[i] = r * std::cos(t);
      if (i + 1 < n) w[i + 1] = r * std::sin(t);
    }
    const double len = norm(w);
    if (len < 1e-12) continue;
    for (double& v : w) v /= len;
    out.push_back(std::move(w));
  }
  return out;
}

FractionalKernel::FractionalKernel(int n, double s, AngularProfile profile, std::optional<double> normalization)
    : n_(n), s_(s), normalization_(normalization.value_or(s * (1.0 - s))), profile_(std::move(profile)) {
  if (n < 2) throw DomainError("kernel dimension must be at least 2");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("kernel exponent s must lie in (0, 1)");
  if (!(normalization_ > 0.0) || !std::isfinite(normalization_))
    throw DomainError("kernel normalization must be positive and finite");

  std::vector<double> neg(n);
  for (const auto& w : sphere_samples(n, kProfileSamples)) {
    for (int i = 0; i < n; ++i) neg[i] = -w[i];
    const double plus = profile_(w);
    const double minus = profile_(neg);
    if (!(plus > 0.0) || !std::isfinite(plus))
      throw DomainError("angular profile '" + profile_.name() + "' is not strictly positive");
    if (std::abs(plus - minus) > kEvennessTol * std::max(1.0, std::abs(plus)))
      throw DomainError("angular profile '" + profile_.name() + "' is not even");
  }
}

double FractionalKernel::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DomainError("point dimension does not match kernel dimension");
  const double r = norm(x);
  if (!(r > 0.0)) throw DomainError("kernel is singular at the origin");
  std::vector<double> unit(x.begin(), x.end());
  for (double& v : unit) v /= r;
  return normalization_ * profile_(unit) / std::pow(r, n_ + s_);
}

double eval_kernel(const FractionalKernel& kernel, std::span<const double> x) { return kernel(x); }

double kernel_gradient_norm(const FractionalKernel& kernel, std::span<const double> x) {
  const double step = 1e-5 * norm(x);
  std::vector<double> probe(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double keep = probe[i];
    probe[i] = keep + step;
    const double fp = kernel(probe);
    probe[i] = keep - step;
    const double fm = kernel(probe);
    probe[i] = keep;
    const double d = (fp - fm) / (2.0 * step);
    sum += d * d;
  }
  return std::sqrt(sum);
}

BoundsReport check_bounds(const FractionalKernel& kernel, const KernelBounds& bounds, int sample_count) {
  if (sample_count < 1) throw DomainError("sample_count must be at least 1");
  if (!(bounds.lambda >= 1.0) || !(bounds.rho0 > 0.0)) throw DomainError("bounds require lambda >= 1 and rho0 > 0");

  const int n = kernel.dim();
  const double power = n + kernel.exponent();
  const auto dirs = sphere_samples(n, sample_count);
  BoundsReport report;
  report.samples = sample_count;
  std::vector<double> x(n);
  for (int i = 0; i < sample_count; ++i) {
    // radii log-spaced over [rho0/10, 10 rho0]
    const double t = sample_count == 1 ? 0.5 : static_cast<double>(i) / (sample_count - 1);
    const double r = bounds.rho0 * std::pow(10.0, -1.0 + 2.0 * t);
    for (int k = 0; k < n; ++k) x[k] = r * dirs[i][k];

    const double scaled = kernel(x) * std::pow(r, power);
    report.upper_ratio = std::max(report.upper_ratio, scaled / bounds.lambda);
    if (r < bounds.rho0) report.lower_ratio = std::max(report.lower_ratio, 1.0 / (bounds.lambda * scaled));
    const double grad = kernel_gradient_norm(kernel, x) * std::pow(r, power + 1.0);
    report.gradient_ratio = std::max(report.gradient_ratio, grad / bounds.lambda);
  }
  report.worst_ratio = std::max({report.upper_ratio, report.lower_ratio, report.gradient_ratio});
  // equality cases (isotropic lower bound) land within round-off of 1
  report.pass = report.worst_ratio <= 1.0 + 1e-12;
  return report;
}

ReducedProfile::ReducedProfile(double s, std::vector<double> table, std::optional<AngularProfile> exact)
    : s_(s), table_(std::move(table)), exact_(std::move(exact)) {
  if (static_cast<int>(table_.size()) != kGridSize) throw DomainError("reduced profile table has the wrong size");
}

double ReducedProfile::operator()(double alpha) const {
  if (exact_) {
    const double w[2] = {std::cos(alpha), std::sin(alpha)};
    return (*exact_)(w);
  }
  double t = std::fmod(alpha, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  const double pos = t / kTwoPi * kGridSize;
  const int i = std::min(static_cast<int>(pos), kGridSize - 1);
  const double frac = pos - i;
  const double left = table_[i];
  const double right = table_[(i + 1) % kGridSize];
  return left + frac * (right - left);
}

namespace {

struct SpherePoint {
  std::vector<double> u;
  double weight;
};

// Product rule on S^{m-1}: trapezoid on the circle, Gauss-Legendre in each
// extra polar angle with its sin^{k-1} Jacobian.
std::vector<SpherePoint> sphere_rule(int m) {
  if (m == 1) return {{{1.0}, 1.0}, {{-1.0}, 1.0}};
  constexpr int kCircle = 64;
  std::vector<SpherePoint> points;
  for (int k = 0; k < kCircle; ++k) {
    const double t = kTwoPi * k / kCircle;
    points.push_back({{std::cos(t), std::sin(t)}, kTwoPi / kCircle});
  }
  const auto gl = quad::gauss_legendre(16);
  for (int dim = 3; dim <= m; ++dim) {
    std::vector<SpherePoint> next;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double phi = 0.5 * std::numbers::pi * (gl.nodes[j] + 1.0);
      const double w = 0.5 * std::numbers::pi * gl.weights[j] * std::pow(std::sin(phi), dim - 2);
      for (const auto& p : points) {
        SpherePoint q;
        q.u.push_back(std::cos(phi));
        for (double c : p.u) q.u.push_back(std::sin(phi) * c);
        q.weight = w * p.weight;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace

ReducedProfile reduce_profile(const FractionalKernel& kernel) {
  const int n = kernel.dim();
  const double s = kernel.exponent();
  std::vector<double> table(ReducedProfile::kGridSize);
  const auto& a = kernel.profile();

  if (n == 2) {
    for (int i = 0; i < ReducedProfile::kGridSize; ++i) {
      const double t = kTwoPi * i / ReducedProfile::kGridSize;
      const double w[2] = {std::cos(t), std::sin(t)};
      table[i] = a(w);
    }
    return ReducedProfile(s, std::move(table), a);
  }

  const int m = n - 2;
  const double p = 0.5 * (n + s);
  const auto rule = sphere_rule(m);

  // Tail cut: the envelope r^{m-1} (1+r^2)^{-p} <= r^{-(3+s)} bounds the mass
  // beyond R by R^{-(2+s)}/(2+s); pick R so that is below 1e-8 of the total.
  double a_min = std::numeric_limits<double>::infinity();
  double a_max = 0.0;
  for (const auto& w : sphere_samples(n, 1024)) {
    a_min = std::min(a_min, a(w));
    a_max = std::max(a_max, a(w));
  }
  const double core = 0.5 * std::exp(std::lgamma(0.5 * m) + std::lgamma(p - 0.5 * m) - std::lgamma(p));
  const double r_tail = std::pow(a_max / (a_min * 1e-8 * core * (2.0 + s)), 1.0 / (2.0 + s));
  std::vector<double> breaks = {0.0};
  for (double b = 1.0; b < r_tail; b *= 10.0) breaks.push_back(b);
  breaks.push_back(r_tail);

  std::vector<double> dir(n);
  for (int i = 0; i < ReducedProfile::kGridSize; ++i) {
    const double t = kTwoPi * i / ReducedProfile::kGridSize;
    const double x1 = std::cos(t);
    const double x2 = std::sin(t);
    auto radial = [&](double r) {
      double angular = 0.0;
      for (const auto& pt : rule) {
        dir[0] = x1;
        for (int k = 0; k < m; ++k) dir[1 + k] = r * pt.u[k];
        dir[n - 1] = x2;
        const double len = std::sqrt(1.0 + r * r);
        for (double& v : dir) v /= len;
        angular += pt.weight * a(dir);
      }
      return std::pow(r, m - 1) * std::pow(1.0 + r * r, -p) * angular;
    };
    table[i] = quad::gauss_kronrod(radial, breaks, {.abs_tol = 1e-14, .rel_tol = 1e-10}).value;
  }
  return ReducedProfile(s, std::move(table));
}

double weighted_profile_integral(const ReducedProfile& profile, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const double s = profile.exponent();
  auto integrand = [&](double alpha) { return profile(alpha) * std::pow(std::abs(std::sin(alpha)), s); };
  std::vector<double> breaks = {lo};
  if (profile.tabulated()) {
    // kinks of the piecewise-linear interpolant
    const double step = kTwoPi / ReducedProfile::kGridSize;
    for (double b = (std::floor(lo / step) + 1.0) * step; b < hi; b += step) breaks.push_back(b);
  }
  breaks.push_back(hi);
  return quad::gauss_kronrod(integrand, breaks, {.abs_tol = 1e-15, .rel_tol = 1e-12}).value;
}

double halfspace_exterior_integral(const FractionalKernel& kernel, const ReducedProfile& reduced, double d) {
  if (!(d > 0.0)) throw DomainError("halfspace distance must be positive");
  const double s = kernel.exponent();
  const double angular = weighted_profile_integral(reduced, 0.0, std::numbers::pi);
  return kernel.normalization() / s * angular * std::pow(d, -s);
}

double halfspace_exterior_integral(const FractionalKernel& kernel, double d) {
  if (!(d > 0.0)) throw DomainError("halfspace distance must be positive");
  return halfspace_exterior_integral(kernel, reduce_profile(kernel), d);
}

}  // namespace nlcap
