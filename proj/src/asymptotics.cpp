#include "nlcap/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <thread>

#include "nlcap/error.hpp"
#include "nlcap/format.hpp"

namespace nlcap {

namespace {
constexpr double kPi = std::numbers::pi;
}

double classical_cap_energy(const CapEnergyQuery& q) {
  if (!(q.theta > 0.0 && q.theta < kPi)) throw DomainError("cap angle theta must lie in (0, pi)");
  if (!(q.m > 0.0)) throw DomainError("cap area m must be positive");
  if (!(std::abs(q.sigma) <= 1.0)) throw DomainError("sigma must lie in [-1, 1]");
  const double area_factor = q.theta - std::sin(q.theta) * std::cos(q.theta);
  const double r = std::sqrt(q.m / area_factor);
  return 2.0 * (q.theta + q.sigma * std::sin(q.theta)) * r;
}

double classical_young(double sigma) {
  if (!(std::abs(sigma) <= 1.0)) throw DomainError("sigma must lie in [-1, 1]");
  return std::acos(-sigma);
}

AngleSolver make_angle_solver(int n, AngularProfile profile, SolverOptions opts) {
  return [n, profile = std::move(profile), opts](double s, double sigma) {
    return solve_contact_angle(ContactAngleProblem::single(FractionalKernel(n, s, profile), sigma), opts);
  };
}

std::vector<double> slope_samples(LimitEnd end) {
  if (end == LimitEnd::s_to_one) return {0.90, 0.95, 0.975, 0.99};
  return {0.01, 0.025, 0.05, 0.10};
}

AsymptoticFit estimate_slope(double sigma, LimitEnd end, const AngleSolver& solver) {
  if (!(std::abs(sigma) < 1.0)) throw DomainError("slope estimation needs |sigma| < 1");
  AsymptoticFit fit;
  fit.sigma = sigma;
  fit.end = end;
  std::vector<double> xs, ys;
  for (double s : slope_samples(end)) {
    const AngleSolution sol = solver(s, sigma);
    if (!sol.theta) throw SolverError("solver returned no angle", 0.0, 0.0);
    fit.samples.emplace_back(s, *sol.theta);
    xs.push_back(end == LimitEnd::s_to_one ? 1.0 - s : s);
    ys.push_back(*sol.theta);
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  const double b = sxy / sxx;
  fit.intercept = my - b * mx;
  fit.slope = -b;
  for (std::size_t k = 0; k < xs.size(); ++k)
    fit.fit_residual = std::max(fit.fit_residual, std::abs(ys[k] - (fit.intercept + b * xs[k])));
  const double leading = end == LimitEnd::s_to_one ? std::acos(-sigma) : 0.5 * kPi * (1.0 + sigma);
  fit.intercept_check = fit.intercept - leading;
  return fit;
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("NLCAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepTable sweep(std::span<const double> s_values, std::span<const double> sigma_values, const AngleSolver& solver,
                 unsigned threads) {
  for (double s : s_values)
    if (!(s > 0.0 && s < 1.0)) throw DomainError("sweep s values must lie in (0, 1)");
  for (double sg : sigma_values)
    if (!(std::abs(sg) <= 1.0)) throw DomainError("sweep sigma values must lie in [-1, 1]");

  SweepTable table;
  for (double s : s_values)
    for (double sg : sigma_values) table.rows.push_back({s, sg, std::nullopt, 0.0, {}});
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return std::pair(a.s, a.sigma) < std::pair(b.s, b.sigma); });

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < table.rows.size(); k = next++) {
      SweepRow& row = table.rows[k];
      try {
        const AngleSolution sol = solver(row.s, row.sigma);
        row.theta = sol.theta;
        row.residual = sol.residual;
        if (!sol.theta) row.error = std::string(to_string(sol.regime));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  if (threads == 0) threads = sweep_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, table.rows.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "s,sigma,theta,residual\n";
  for (const auto& row : table.rows) {
    out << format_double(row.s) << ',' << format_double(row.sigma) << ',';
    if (row.theta)
      out << format_double(*row.theta) << ',' << format_double(row.residual) << '\n';
    else
      out << "nan,nan\n";
  }
}

}  // namespace nlcap
