#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"
#include "nlcap/quadrature.hpp"

namespace nlcap::droplet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kExactRange = 8;
constexpr int kRayNodes = 24;

void require_planar(const FractionalKernel& kernel) {
  if (kernel.dim() != 2) throw DomainError("the lattice minimizer works with planar (n = 2) kernels");
}

double planar_kernel(const FractionalKernel& kernel, double x, double y) {
  const double p[2] = {x, y};
  return kernel(p);
}

// Distance along direction (cx, cy) from (px, py) to the boundary of the
// rectangle [x0, x1] x [y0, y1] containing the point.
double exit_distance(double px, double py, double cx, double cy, double x0, double x1, double y0, double y1) {
  double t = std::numeric_limits<double>::infinity();
  if (cx > 0.0) t = std::min(t, (x1 - px) / cx);
  if (cx < 0.0) t = std::min(t, (x0 - px) / cx);
  if (cy > 0.0) t = std::min(t, (y1 - py) / cy);
  if (cy < 0.0) t = std::min(t, (y0 - py) / cy);
  return t;
}

double angle_to(double px, double py, double x, double y) {
  double a = std::atan2(y - py, x - px);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Integral over the full circle of directions of norm/s * a(w) * radial(w),
// split at the given breakpoint angles.
template <class Radial>
double ray_integral(const FractionalKernel& kernel, const quad::Rule& rule, std::vector<double> breaks,
                    Radial&& radial) {
  breaks.push_back(0.0);
  breaks.push_back(kTwoPi);
  std::sort(breaks.begin(), breaks.end());
  const double scale = kernel.normalization() / kernel.exponent();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k];
    const double hi = breaks[k + 1];
    if (hi - lo < 1e-15) continue;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double seg = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double psi = mid + half * rule.nodes[q];
      const double w[2] = {std::cos(psi), std::sin(psi)};
      seg += rule.weights[q] * kernel.profile()(w) * radial(w[0], w[1]);
    }
    total += seg * half;
  }
  return scale * total;
}

// Integral over two unit cells at lattice offset (dx, dy) of K(x - y). The
// overlap of the two cells as a function of z = x - y is the tent product
// T(z1 - dx) T(z2 - dy) with T(u) = max(0, 1 - |u|), so in polar coordinates
// the radial integral of r^{-1-s} times a piecewise quadratic is closed form.
double exact_cell_pair(const FractionalKernel& kernel, int dx, int dy) {
  const double s = kernel.exponent();
  auto radial = [&](double c, double d) {
    std::vector<double> cuts = {0.0};
    for (int k = -1; k <= 1; ++k) {
      if (c != 0.0 && (dx + k) / c > 0.0) cuts.push_back((dx + k) / c);
      if (d != 0.0 && (dy + k) / d > 0.0) cuts.push_back((dy + k) / d);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double ra = cuts[k], rb = cuts[k + 1];
      if (rb - ra <= 0.0) continue;
      const double rm = 0.5 * (ra + rb);
      const double u = rm * c - dx, v = rm * d - dy;
      if (std::abs(u) >= 1.0 || std::abs(v) >= 1.0) continue;
      // on this piece T(u) = p0 + p1 r and T(v) = q0 + q1 r
      const double su = u < 0.0 ? -1.0 : 1.0, sv = v < 0.0 ? -1.0 : 1.0;
      const double p0 = 1.0 + su * dx, p1 = -su * c;
      const double q0 = 1.0 + sv * dy, q1 = -sv * d;
      // the tents vanish at the origin for every nonzero offset
      const double a0 = ra == 0.0 ? 0.0 : p0 * q0;
      const double a1 = p0 * q1 + p1 * q0, a2 = p1 * q1;
      auto prim = [&](double r) {
        double v0 = a1 * std::pow(r, 1.0 - s) / (1.0 - s) + a2 * std::pow(r, 2.0 - s) / (2.0 - s);
        if (a0 != 0.0) v0 -= a0 * std::pow(r, -s) / s;
        return v0;
      };
      total += prim(rb) - prim(ra);
    }
    return total;
  };
  std::vector<double> breaks = {0.0, kTwoPi};
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      if (dx + i == 0 && dy + j == 0) continue;
      breaks.push_back(angle_to(0.0, 0.0, dx + i, dy + j));
    }
  for (double a : {0.0, 0.5, 1.0, 1.5}) breaks.push_back(a * std::numbers::pi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = 1e-10;
  const auto res = quad::gauss_kronrod(
      [&](double phi) {
        const double w[2] = {std::cos(phi), std::sin(phi)};
        return kernel.profile()(w) * radial(w[0], w[1]);
      },
      breaks, opts);
  return kernel.normalization() * res.value;
}

// Midpoint value plus the O(h^2) term of the cell-pair average, with the
// Laplacian of K taken by central differences.
double corrected_midpoint(const FractionalKernel& kernel, int dx, int dy) {
  const double x = dx, y = dy;
  const double step = 1e-2 * std::hypot(x, y);
  const double k0 = planar_kernel(kernel, x, y);
  const double lap = (planar_kernel(kernel, x + step, y) + planar_kernel(kernel, x - step, y) +
                      planar_kernel(kernel, x, y + step) + planar_kernel(kernel, x, y - step) - 4.0 * k0) /
                     (step * step);
  return k0 + lap / 12.0;
}

}  // namespace

PairWeights::PairWeights(const GridDomain& grid, const FractionalKernel& kernel)
    : dx_off_(grid.width() - 1), dy_off_(grid.height() - 1), stride_(2 * grid.width() - 1) {
  require_planar(kernel);
  // K is homogeneous of degree -(2+s), so every weight is h^{2-s} times its
  // unit-lattice value.
  const double scale = std::pow(grid.spacing(), 2.0 - kernel.exponent());
  table_.assign(static_cast<std::size_t>(stride_) * (2 * grid.height() - 1), 0.0);
  for (int dy = -dy_off_; dy <= dy_off_; ++dy) {
    for (int dx = -dx_off_; dx <= dx_off_; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const bool near = std::max(std::abs(dx), std::abs(dy)) <= kExactRange;
      const double w = near ? exact_cell_pair(kernel, dx, dy) : corrected_midpoint(kernel, dx, dy);
      table_[(dy + dy_off_) * stride_ + dx + dx_off_] = scale * w;
    }
  }
}

double interaction_energy(const PairWeights& weights, const GridDomain& grid, std::span<const int> x_cells,
                          std::span<const int> y_cells) {
  std::vector<std::uint8_t> seen(grid.cell_count(), 0);
  for (int c : x_cells) seen[c] = 1;
  for (int c : y_cells)
    if (seen[c]) throw DomainError("interaction sets must be disjoint");
  double total = 0.0;
  for (int x : x_cells) {
    const int xi = grid.column(x);
    const int xj = grid.row(x);
    double row = 0.0;
    for (int y : y_cells) row += weights(grid.column(y) - xi, grid.row(y) - xj);
    total += row;
  }
  return total;
}

double interaction_energy(const GridDomain& grid, std::span<const int> x_cells, std::span<const int> y_cells,
                          const FractionalKernel& kernel) {
  return interaction_energy(PairWeights(grid, kernel), grid, x_cells, y_cells);
}

double outside_box_tail(const GridDomain& grid, const FractionalKernel& kernel, double px, double py) {
  require_planar(kernel);
  const auto rule = quad::gauss_legendre(kRayNodes);
  const double bx = grid.width() * grid.spacing();
  const double by = grid.height() * grid.spacing();
  const double s = kernel.exponent();
  const std::vector<double> breaks = {angle_to(px, py, 0, 0), angle_to(px, py, bx, 0), angle_to(px, py, bx, by),
                                      angle_to(px, py, 0, by)};
  return ray_integral(kernel, rule, breaks, [&](double cx, double cy) {
    return std::pow(exit_distance(px, py, cx, cy, 0.0, bx, 0.0, by), -s);
  });
}

double outside_box_tail(const GridDomain& grid, const FractionalKernel& kernel, int cell) {
  return outside_box_tail(grid, kernel, grid.center_x(cell), grid.center_y(cell));
}

double container_exterior_tail(const GridDomain& grid, const FractionalKernel& kernel, double px, double py) {
  require_planar(kernel);
  const double s = kernel.exponent();
  if (grid.kind() == ContainerKind::halfplane)
    return halfspace_exterior_integral(kernel, 1.0) * std::pow(py - grid.container_y0(), -s);
  const auto rule = quad::gauss_legendre(kRayNodes);
  const double x0 = grid.container_x0(), x1 = grid.container_x1();
  const double y0 = grid.container_y0(), y1 = grid.container_y1();
  const std::vector<double> breaks = {angle_to(px, py, x0, y0), angle_to(px, py, x1, y0), angle_to(px, py, x1, y1),
                                      angle_to(px, py, x0, y1)};
  return ray_integral(kernel, rule, breaks, [&](double cx, double cy) {
    return std::pow(exit_distance(px, py, cx, cy, x0, x1, y0, y1), -s);
  });
}

double cell_integral(const FractionalKernel& kernel, double x0, double x1, double y0, double y1) {
  require_planar(kernel);
  const double s = kernel.exponent();
  const double near = std::max({-x1, x0, -y1, y0});  // > 0 when the origin lies outside the closed cell
  const double size = std::max(x1 - x0, y1 - y0);
  if (near > kExactRange * size) {
    // midpoint with the O(size^2) term of the cell average
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double step = 1e-2 * std::hypot(cx, cy);
    const double k0 = planar_kernel(kernel, cx, cy);
    const double kxx = (planar_kernel(kernel, cx + step, cy) + planar_kernel(kernel, cx - step, cy) - 2.0 * k0);
    const double kyy = (planar_kernel(kernel, cx, cy + step) + planar_kernel(kernel, cx, cy - step) - 2.0 * k0);
    const double wx = x1 - x0, wy = y1 - y0;
    return wx * wy * (k0 + (wx * wx * kxx + wy * wy * kyy) / (24.0 * step * step));
  }
  std::vector<double> breaks = {0.0, kTwoPi};
  for (double x : {x0, x1})
    for (double y : {y0, y1})
      if (x != 0.0 || y != 0.0) breaks.push_back(angle_to(0.0, 0.0, x, y));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = 1e-10;
  const auto res = quad::gauss_kronrod(
      [&](double phi) {
        const double c = std::cos(phi), d = std::sin(phi);
        // slab intersection of the ray with the cell
        double t_in = 0.0, t_out = std::numeric_limits<double>::infinity();
        auto slab = [&](double lo, double hi, double dir) {
          if (dir == 0.0) {
            if (lo > 0.0 || hi < 0.0) t_out = -1.0;
            return;
          }
          const double a = lo / dir, b = hi / dir;
          t_in = std::max(t_in, std::min(a, b));
          t_out = std::min(t_out, std::max(a, b));
        };
        slab(x0, x1, c);
        slab(y0, y1, d);
        if (!(t_out > t_in) || t_in <= 0.0) return 0.0;
        const double w[2] = {c, d};
        return kernel.profile()(w) * (std::pow(t_in, -s) - std::pow(t_out, -s)) / s;
      },
      breaks, opts);
  return kernel.normalization() * res.value;
}

ExteriorTails exterior_tails(const GridDomain& grid, const FractionalKernel& kernel) {
  require_planar(kernel);
  const int count = grid.cell_count();
  ExteriorTails tails;
  tails.gas.assign(count, 0.0);
  tails.solid.assign(count, 0.0);
  tails.outside_box.assign(count, 0.0);
  tails.container_ext.assign(count, 0.0);

  const auto rule = quad::gauss_legendre(kRayNodes);
  const double bx = grid.width() * grid.spacing();
  const double by = grid.height() * grid.spacing();
  const double s = kernel.exponent();
  const double halfspace_unit =
      grid.kind() == ContainerKind::halfplane ? halfspace_exterior_integral(kernel, 1.0) : 0.0;

  for (int c = 0; c < count; ++c) {
    if (!grid.in_container(c)) continue;
    const double px = grid.center_x(c);
    const double py = grid.center_y(c);
    std::vector<double> box_breaks = {angle_to(px, py, 0, 0), angle_to(px, py, bx, 0), angle_to(px, py, bx, by),
                                      angle_to(px, py, 0, by)};
    auto t_box = [&](double cx, double cy) { return exit_distance(px, py, cx, cy, 0.0, bx, 0.0, by); };

    tails.outside_box[c] = outside_box_tail(grid, kernel, c);

    if (grid.kind() == ContainerKind::halfplane) {
      const double wall = grid.container_y0();
      const double d = py - wall;
      auto breaks = box_breaks;
      breaks.push_back(angle_to(px, py, 0, wall));
      breaks.push_back(angle_to(px, py, bx, wall));
      breaks.push_back(std::numbers::pi);
      tails.gas[c] = ray_integral(kernel, rule, breaks, [&](double cx, double cy) {
        const double tb = t_box(cx, cy);
        if (cy >= 0.0) return std::pow(tb, -s);
        const double t0 = d / -cy;
        return tb < t0 ? std::pow(tb, -s) - std::pow(t0, -s) : 0.0;
      });
      tails.solid[c] = ray_integral(kernel, rule, breaks, [&](double cx, double cy) {
        if (cy >= 0.0) return 0.0;
        return std::pow(std::max(t_box(cx, cy), d / -cy), -s);
      });
      tails.container_ext[c] = halfspace_unit * std::pow(d, -s);
    } else {
      tails.solid[c] = tails.outside_box[c];
      tails.container_ext[c] = container_exterior_tail(grid, kernel, px, py);
    }
  }
  return tails;
}

EnergyModel::EnergyModel(const GridDomain& grid, const ContactAngleProblem& problem, EnergyOptions opts)
    : grid_(grid),
      sigma_(problem.sigma()),
      gas_tail_(opts.gas_tail),
      w1_(grid, problem.kernel1()),
      w2_(problem.is_single_kernel() ? w1_ : PairWeights(grid, problem.kernel2())),
      tails1_(exterior_tails(grid, problem.kernel1())),
      tails2_(problem.is_single_kernel() ? tails1_ : exterior_tails(grid, problem.kernel2())) {
  const int count = grid.cell_count();
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<int> container, solid;
  for (int c = 0; c < count; ++c) (grid.in_container(c) ? container : solid).push_back(c);

  gas_.assign(count, 0.0);
  solid_.assign(count, 0.0);
  for (int x : container) {
    const int xi = grid.column(x), xj = grid.row(x);
    double g = 0.0;
    for (int y : container) g += w1_(grid.column(y) - xi, grid.row(y) - xj);
    double q = 0.0;
    for (int y : solid) q += w2_(grid.column(y) - xi, grid.row(y) - xj);
    if (gas_tail_) g += h2 * tails1_.gas[x];
    gas_[x] = g;
    solid_[x] = q + h2 * tails2_.solid[x];
  }
}

EnergyBreakdown EnergyModel::breakdown(const DropletState& state) const {
  const auto droplet = cells_of(state);
  std::vector<int> gas_cells;
  for (int c = 0; c < grid_.cell_count(); ++c)
    if (grid_.in_container(c) && !state.occupancy[c]) gas_cells.push_back(c);

  EnergyBreakdown e;
  e.liquid_gas = interaction_energy(w1_, grid_, droplet, gas_cells);
  std::vector<int> solid_cells;
  for (int c = 0; c < grid_.cell_count(); ++c)
    if (!grid_.in_container(c)) solid_cells.push_back(c);
  e.liquid_solid = interaction_energy(w2_, grid_, droplet, solid_cells);

  const double h2 = grid_.spacing() * grid_.spacing();
  for (int x : droplet) {
    if (gas_tail_) e.liquid_gas += h2 * tails1_.gas[x];
    e.liquid_solid += h2 * tails2_.solid[x];
  }
  e.total = e.liquid_gas + sigma_ * e.liquid_solid;
  return e;
}

std::vector<double> EnergyModel::droplet_potential(const DropletState& state) const {
  std::vector<double> u(grid_.cell_count(), 0.0);
  const auto droplet = cells_of(state);
  for (int x = 0; x < grid_.cell_count(); ++x) {
    if (!grid_.in_container(x)) continue;
    const int xi = grid_.column(x), xj = grid_.row(x);
    double sum = 0.0;
    for (int y : droplet) sum += w1_(grid_.column(y) - xi, grid_.row(y) - xj);
    u[x] = sum;
  }
  return u;
}

double EnergyModel::swap_delta(std::span<const double> u, int from, int to) const {
  const double removal = 2.0 * u[from] - gas_[from] - sigma_ * solid_[from];
  const double coupling = w1_(grid_.column(to) - grid_.column(from), grid_.row(to) - grid_.row(from));
  const double addition = gas_[to] - 2.0 * (u[to] - coupling) + sigma_ * solid_[to];
  return removal + addition;
}

void EnergyModel::update_potential(std::vector<double>& u, int from, int to) const {
  const int fi = grid_.column(from), fj = grid_.row(from);
  const int ti = grid_.column(to), tj = grid_.row(to);
  for (int x = 0; x < grid_.cell_count(); ++x) {
    if (!grid_.in_container(x)) continue;
    const int xi = grid_.column(x), xj = grid_.row(x);
    u[x] += w1_(ti - xi, tj - xj) - w1_(fi - xi, fj - xj);
  }
}

EnergyBreakdown capillarity_energy(const GridDomain& grid, const DropletState& state,
                                   const ContactAngleProblem& problem, EnergyOptions opts) {
  return EnergyModel(grid, problem, opts).breakdown(state);
}

}  // namespace nlcap::droplet
