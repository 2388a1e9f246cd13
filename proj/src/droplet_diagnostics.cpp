#include <algorithm>
#include <array>
#include <cmath>

#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"

namespace nlcap::droplet {

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbors = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// Measured-angle window, in cells.
constexpr int kAngleRows = 8;
constexpr int kAngleSkipRows = 2;
constexpr int kAngleHalfWidth = 16;
constexpr int kCapSkipRows = 2;

bool occupied(const GridDomain& grid, const DropletState& state, int i, int j) {
  return grid.contains(i, j) && state.occupancy[grid.index(i, j)];
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

// Slope b of the least-squares fit x = a + b y.
std::optional<double> fit_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return std::nullopt;
  double my = 0.0, mx = 0.0;
  for (const auto& [y, x] : pts) my += y, mx += x;
  my /= pts.size();
  mx /= pts.size();
  double syy = 0.0, sxy = 0.0;
  for (const auto& [y, x] : pts) {
    syy += (y - my) * (y - my);
    sxy += (y - my) * (x - mx);
  }
  if (syy <= 0.0) return std::nullopt;
  return sxy / syy;
}

// Algebraic (Kasa) circle fit of the interface above the first kCapSkipRows
// rows; the cap meets the wall where cos(theta) = -(centre height) / radius.
std::optional<double> cap_angle(const GridDomain& grid, const DropletState& state) {
  const double h = grid.spacing();
  const double wall = grid.container_y0();
  std::vector<std::array<double, 2>> pts;
  for (const auto& [x, y] : interface_points(grid, state))
    if (y - wall > kCapSkipRows * h) pts.push_back({x, y - wall});
  if (pts.size() < 3) return std::nullopt;

  // Normal equations for x^2 + y^2 + D x + E y + F = 0, centred for conditioning.
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) mx += p[0], my += p[1];
  mx /= pts.size();
  my /= pts.size();
  double a[3][4] = {};
  for (const auto& p : pts) {
    const double u = p[0] - mx, v = p[1] - my;
    const double row[3] = {u, v, 1.0};
    const double rhs = -(u * u + v * v);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
      a[r][3] += row[r] * rhs;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  const double d = a[0][3] / a[0][0], e = a[1][3] / a[1][1], f = a[2][3] / a[2][2];
  const double cu = -0.5 * d, cv = -0.5 * e;
  const double r2 = cu * cu + cv * cv - f;
  if (!(r2 > 0.0)) return std::nullopt;
  const double height = cv + my;
  return std::acos(std::clamp(-height / std::sqrt(r2), -1.0, 1.0));
}

}  // namespace

ElResidual el_residual(const GridDomain& grid, const DropletState& state, const ContactAngleProblem& problem) {
  if (state.volume_cells == 0 || state.volume_cells == grid.container_cells())
    throw DomainError("Euler-Lagrange residual needs a droplet with a nonempty complement");
  const FractionalKernel& k1 = problem.kernel1();
  const FractionalKernel& k2 = problem.kernel2();
  const double h = grid.spacing();
  const int w = grid.width(), ht = grid.height();
  const int stride = 2 * w + 1;

  // Kernel mass of each cell seen from an edge midpoint, unit lattice. For a
  // horizontal edge the cell at offset (a, b) is [a - 1/2, a + 1/2] x [b, b + 1];
  // for a vertical edge it is [a, a + 1] x [b - 1/2, b + 1/2].
  std::vector<double> horiz(static_cast<std::size_t>(stride) * (2 * ht + 1), 0.0);
  std::vector<double> vert(horiz.size(), 0.0);
  for (int b = -ht; b <= ht; ++b)
    for (int a = -w; a <= w; ++a) {
      const auto at = static_cast<std::size_t>((b + ht) * stride + a + w);
      if (!(a == 0 && (b == 0 || b == -1))) horiz[at] = cell_integral(k1, a - 0.5, a + 0.5, b, b + 1.0);
      if (!(b == 0 && (a == 0 || a == -1))) vert[at] = cell_integral(k1, a, a + 1.0, b - 0.5, b + 0.5);
    }
  const double scale = std::pow(h, -k1.exponent());

  ElResidual out;
  for (int x = 0; x < grid.cell_count(); ++x) {
    if (!state.occupancy[x]) continue;
    const int xi = grid.column(x), xj = grid.row(x);
    for (const auto& d : kNeighbors) {
      const int ni = xi + d[0], nj = xj + d[1];
      if (!grid.contains(ni, nj)) continue;
      const int nb = grid.index(ni, nj);
      if (!grid.in_container(nb) || state.occupancy[nb]) continue;
      const double px = (xi + 0.5 + 0.5 * d[0]) * h, py = (xj + 0.5 + 0.5 * d[1]) * h;
      if (grid.distance_to_container_boundary(px, py) <= 3.0 * h) continue;

      // The two cells sharing the edge mirror each other across it and carry
      // opposite signs, so their principal-value contributions cancel.
      const bool horizontal = d[0] == 0;
      const int ei = horizontal ? xi : std::max(xi, ni);  // lattice corner the table is anchored at
      const int ej = horizontal ? std::max(xj, nj) : xj;
      const auto& table = horizontal ? horiz : vert;
      double nmc = 0.0;
      for (int y = 0; y < grid.cell_count(); ++y) {
        const double m = table[static_cast<std::size_t>((grid.row(y) - ej + ht) * stride + grid.column(y) - ei + w)];
        nmc += state.occupancy[y] ? -m : m;
      }
      nmc = scale * nmc + outside_box_tail(grid, k1, px, py);
      const double value = nmc - container_exterior_tail(grid, k1, px, py) +
                           problem.sigma() * container_exterior_tail(grid, k2, px, py);
      out.values.push_back({x, px, py, value});
    }
  }
  if (out.values.empty()) throw DomainError("no droplet interface away from the container boundary");

  std::vector<double> v;
  for (const auto& e : out.values) v.push_back(e.value);
  out.min = *std::min_element(v.begin(), v.end());
  out.max = *std::max_element(v.begin(), v.end());
  out.median = median_of(v);
  out.spread = (out.max - out.min) / std::abs(out.median);
  return out;
}

ContactAngleMeasurement measure_contact_angle(const GridDomain& grid, const DropletState& state, AngleFit fit) {
  if (grid.kind() != ContainerKind::halfplane)
    throw DomainError("contact angle measurement needs a halfplane container");
  const int wall = grid.wall_row();
  const double h = grid.spacing();
  ContactAngleMeasurement out;

  int left = -1, right = -1;
  for (int i = 0; i < grid.width(); ++i)
    if (occupied(grid, state, i, wall)) {
      if (left < 0) left = i;
      right = i;
    }
  if (left < 0) return out;
  out.wet = true;

  auto side = [&](int contact, bool is_left) -> std::optional<double> {
    // a contact cell on the box edge has no interface to fit
    if ((is_left && contact == 0) || (!is_left && contact == grid.width() - 1)) return std::nullopt;
    std::vector<std::pair<double, double>> pts;
    const int lo = std::max(0, contact - kAngleHalfWidth);
    const int hi = std::min(grid.width() - 1, contact + kAngleHalfWidth);
    for (int k = kAngleSkipRows; k < kAngleRows; ++k) {
      const int j = wall + k;
      if (j >= grid.height()) break;
      int found = -1;
      if (is_left) {
        for (int i = lo; i <= hi && found < 0; ++i)
          if (occupied(grid, state, i, j)) found = i;
      } else {
        for (int i = hi; i >= lo && found < 0; --i)
          if (occupied(grid, state, i, j)) found = i;
      }
      if (found < 0) continue;
      const double x = (is_left ? found : found + 1) * h;
      pts.emplace_back((k + 0.5) * h, x);
    }
    const auto slope = fit_slope(pts);
    if (!slope) return std::nullopt;
    return std::atan2(1.0, is_left ? *slope : -*slope);
  };

  out.left = side(left, true);
  out.right = side(right, false);
  if (fit == AngleFit::cap) {
    out.theta = cap_angle(grid, state);
    return out;
  }
  if (out.left && out.right)
    out.theta = 0.5 * (*out.left + *out.right);
  else if (out.left)
    out.theta = out.left;
  else if (out.right)
    out.theta = out.right;
  return out;
}

std::vector<std::pair<double, double>> interface_points(const GridDomain& grid, const DropletState& state) {
  std::vector<std::pair<double, double>> pts;
  const double h = grid.spacing();
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (!state.occupancy[c]) continue;
    const int i = grid.column(c), j = grid.row(c);
    for (const auto& d : kNeighbors) {
      const int ni = i + d[0], nj = j + d[1];
      if (!grid.contains(ni, nj)) continue;
      const int nb = grid.index(ni, nj);
      if (!grid.in_container(nb) || state.occupancy[nb]) continue;
      pts.emplace_back((i + 0.5 + 0.5 * d[0]) * h, (j + 0.5 + 0.5 * d[1]) * h);
    }
  }
  return pts;
}

DensityReport density_check(const GridDomain& grid, const DropletState& state, std::span<const double> radii,
                            std::span<const std::pair<double, double>> points) {
  DensityReport out;
  const double h = grid.spacing();
  bool first = true;
  for (const auto& [px, py] : points) {
    for (double r : radii) {
      if (!(r > 0.0)) throw DomainError("density radii must be positive");
      long inside = 0, wet = 0;
      const int i0 = static_cast<int>(std::floor((px - r) / h)) - 1;
      const int i1 = static_cast<int>(std::ceil((px + r) / h)) + 1;
      const int j0 = static_cast<int>(std::floor((py - r) / h)) - 1;
      const int j1 = static_cast<int>(std::ceil((py + r) / h)) + 1;
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          const double dx = (i + 0.5) * h - px;
          const double dy = (j + 0.5) * h - py;
          if (dx * dx + dy * dy > r * r) continue;
          ++inside;
          if (occupied(grid, state, i, j)) ++wet;
        }
      const double ratio = inside > 0 ? static_cast<double>(wet) / inside : 0.0;
      out.samples.push_back({px, py, r, ratio});
      out.min = first ? ratio : std::min(out.min, ratio);
      out.max = first ? ratio : std::max(out.max, ratio);
      first = false;
    }
  }
  return out;
}

DensityReport density_check(const GridDomain& grid, const DropletState& state, std::span<const double> radii) {
  const auto pts = interface_points(grid, state);
  return density_check(grid, state, radii, pts);
}

std::vector<int> centered_square(const GridDomain& grid, int side) {
  if (side <= 0 || side > grid.width() || side > grid.height()) throw DomainError("square does not fit the grid");
  const int i0 = (grid.width() - side) / 2;
  const int j0 = (grid.height() - side) / 2;
  std::vector<int> cells;
  for (int j = j0; j < j0 + side; ++j)
    for (int i = i0; i < i0 + side; ++i) cells.push_back(grid.index(i, j));
  return cells;
}

std::vector<ClassicalLimitRow> classical_limit_check(const GridDomain& grid, std::span<const int> shape,
                                                     std::span<const double> s_values) {
  std::vector<std::uint8_t> in_shape(grid.cell_count(), 0);
  for (int c : shape) in_shape[c] = 1;
  std::vector<int> complement;
  for (int c = 0; c < grid.cell_count(); ++c)
    if (!in_shape[c]) complement.push_back(c);

  const double h = grid.spacing();
  long edges = 0;
  for (int c : shape) {
    const int i = grid.column(c), j = grid.row(c);
    for (const auto& d : kNeighbors) {
      const int ni = i + d[0], nj = j + d[1];
      if (!grid.contains(ni, nj) || !in_shape[grid.index(ni, nj)]) ++edges;
    }
  }
  const double perimeter = edges * h;

  std::vector<ClassicalLimitRow> rows;
  for (double s : s_values) {
    const FractionalKernel kernel(2, s);
    const PairWeights weights(grid, kernel);
    double energy = interaction_energy(weights, grid, shape, complement);
    for (int c : shape) energy += h * h * outside_box_tail(grid, kernel, c);
    rows.push_back({s, energy, perimeter, energy / perimeter});
  }
  return rows;
}

}  // namespace nlcap::droplet
