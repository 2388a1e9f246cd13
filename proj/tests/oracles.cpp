#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace oracle {

namespace {
constexpr double kPi = std::numbers::pi;

double radial(double a, double b, double s) {
  // int_a^b r^{-1-s} dr, b may be infinite
  const double tail_b = std::isinf(b) ? 0.0 : std::pow(b, -s);
  return (std::pow(a, -s) - tail_b) / s;
}
}  // namespace

Estimate mc_halfspace(double s, double d, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double norm = s * (1.0 - s);
  double sum = 0.0, sum2 = 0.0;
  for (long k = 0; k < samples; ++k) {
    const double u1 = 1.0 - unit(rng);  // (0, 1]
    const double t = d * std::pow(u1, -1.0 / s);
    const double u = t * std::tan(kPi * (unit(rng) - 0.5));
    const double r2 = u * u + t * t;
    const double kernel = norm * std::pow(r2, -(2.0 + s) / 2.0);
    const double p_t = s * std::pow(d, s) * std::pow(t, -s - 1.0);
    const double p_u = t / (kPi * r2);
    const double w = kernel / (p_t * p_u);
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / samples;
  const double var = std::max(0.0, sum2 / samples - mean * mean);
  return {mean, std::sqrt(var / samples)};
}

double wedge_nmc_rays(double s, double theta, double eps, int angles, const std::function<double(double)>& profile) {
  const double vx = std::cos(theta), vy = std::sin(theta);
  auto in_e = [&](double x, double y) { return y > 0.0 && std::cos(theta) * y - std::sin(theta) * x < 0.0; };
  const double norm = s * (1.0 - s);
  double total = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double psi = (k + 0.5) * 2.0 * kPi / angles;
    const double c = std::cos(psi), d = std::sin(psi);
    std::vector<double> cuts = {eps};
    if (d < 0.0) {
      const double t_wall = -vy / d;
      if (t_wall > eps) cuts.push_back(t_wall);
    }
    cuts.push_back(std::numeric_limits<double>::infinity());
    double ray = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double a = cuts[j], b = cuts[j + 1];
      const double mid = std::isinf(b) ? 2.0 * a + 1.0 : 0.5 * (a + b);
      const double sign = in_e(vx + mid * c, vy + mid * d) ? -1.0 : 1.0;
      ray += sign * radial(a, b, s);
    }
    total += (profile ? profile(psi) : 1.0) * ray;
  }
  return norm * total * 2.0 * kPi / angles;
}

double halfplane_exterior_rays(double s, double d, int angles) {
  double total = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double psi = kPi + (k + 0.5) * kPi / angles;
    total += radial(d / -std::sin(psi), std::numeric_limits<double>::infinity(), s);
  }
  return s * (1.0 - s) * total * kPi / angles;
}

double young_angle_rays(double s, double sigma, double lo, double hi, int angles) {
  auto residual = [&](double theta) {
    return wedge_nmc_rays(s, theta, 1e-3, angles) + (sigma - 1.0) * halfplane_exterior_rays(s, std::sin(theta), angles);
  };
  const double r_lo = residual(lo);
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((residual(mid) > 0.0) == (r_lo > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double reduced_isotropic(int n, double s) {
  const int m = n - 2;
  return std::pow(kPi, 0.5 * m) * std::tgamma(1.0 + 0.5 * s) / std::tgamma(0.5 * (n + s));
}

double reduced_ellipse_n3(double s, double e, double alpha) {
  auto beta_line = [](double p) { return std::sqrt(kPi) * std::tgamma(p - 0.5) / std::tgamma(p); };
  const double p = 0.5 * (3.0 + s);
  const double c = std::cos(alpha);
  return beta_line(p) + e * c * c * beta_line(p + 1.0);
}

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double step = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * step);
  return sum * step / 3.0;
}

double young_angle_simpson(double s, double sigma, const std::function<double(double)>& a_star, int intervals) {
  auto g = [&](double t) { return a_star(t) * std::pow(std::sin(t), s); };
  const double total = simpson(g, 0.0, kPi, intervals);
  const double target = 0.5 * (1.0 + sigma) * total;
  double lo = 0.0, hi = kPi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int panels = std::max(2, static_cast<int>(intervals * mid / kPi));
    if (simpson(g, 0.0, mid, panels) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double cap_energy_argmin(double m, double sigma, double step) {
  double best = 0.0, best_e = std::numeric_limits<double>::infinity();
  for (double theta = step; theta < kPi; theta += step) {
    const double r = std::sqrt(m / (theta - std::sin(theta) * std::cos(theta)));
    const double e = 2.0 * r * (theta + sigma * std::sin(theta));
    if (e < best_e) best_e = e, best = theta;
  }
  return best;
}

double continuum_interaction(const RayScene& scene, double s, int nodes_per_axis, int angles) {
  // Gauss-Legendre nodes on [0, 1] by bisection on P_n (independent of the library rule).
  const int n = nodes_per_axis;
  std::vector<double> gx(n), gw(n);
  for (int i = 0; i < n; ++i) {
    auto legendre = [&](double x, double& deriv) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      deriv = n * (x * p1 - p0) / (x * x - 1.0);
      return p1;
    };
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    gx[i] = 0.5 * (1.0 - x);
    gw[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // = (2 / ((1-x^2) P'^2)) / 2
  }
  // smootherstep map: vanishes to third order at both cell edges, which tames
  // the dist^{-s} growth of the inner integral next to an interface
  auto map = [](double u) { return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u); };
  auto jac = [](double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); };

  const double h = scene.h;
  const double inf = std::numeric_limits<double>::infinity();
  const double golden = 0.6180339887498949;
  double total = 0.0;
  long point_index = 0;

  for (int cj = 0; cj < scene.height; ++cj) {
    for (int ci = 0; ci < scene.width; ++ci) {
      if (!scene.source[cj * scene.width + ci]) continue;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double px = (ci + map(gx[a])) * h;
          const double py = (cj + map(gx[b])) * h;
          const double weight = gw[a] * jac(gx[a]) * gw[b] * jac(gx[b]) * h * h;
          const double offset = std::fmod(golden * static_cast<double>(++point_index), 1.0);
          double point = 0.0;
          for (int q = 0; q < angles; ++q) {
            const double psi = (q + offset) * 2.0 * kPi / angles;
            const double c = std::cos(psi), d = std::sin(psi);
            // grid traversal (Amanatides-Woo)
            int i = ci, j = cj;
            const int step_i = c > 0 ? 1 : -1, step_j = d > 0 ? 1 : -1;
            double next_x = c != 0.0 ? (((c > 0 ? i + 1 : i) * h) - px) / c : inf;
            double next_y = d != 0.0 ? (((d > 0 ? j + 1 : j) * h) - py) / d : inf;
            const double dx = c != 0.0 ? h / std::abs(c) : inf;
            const double dy = d != 0.0 ? h / std::abs(d) : inf;
            double t_in = 0.0;
            while (true) {
              const double t_out = std::min(next_x, next_y);
              if (t_in > 0.0 && scene.target[j * scene.width + i]) point += radial(t_in, t_out, s);
              if (next_x < next_y) {
                i += step_i;
                next_x += dx;
              } else {
                j += step_j;
                next_y += dy;
              }
              t_in = t_out;
              if (i < 0 || j < 0 || i >= scene.width || j >= scene.height) break;
            }
            if (scene.beyond_box) point += scene.beyond_box(px, py, c, d, t_in);
          }
          total += point * 2.0 * kPi / angles * weight;
        }
      }
    }
  }
  return s * (1.0 - s) * total;
}

}  // namespace oracle
