#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"
#include "nlcap/format.hpp"

namespace nlcap::droplet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GridDomain::GridDomain(ContainerKind kind, int box_w, int box_h, double h, int x0, int x1, int y0, int y1)
    : kind_(kind), box_w_(box_w), box_h_(box_h), h_(h), wall_row_(y0) {
  if (box_w <= 0 || box_h <= 0) throw DomainError("grid box must have positive extents");
  if (!(h > 0.0)) throw DomainError("lattice spacing h must be positive");
  mask_.assign(static_cast<std::size_t>(box_w) * box_h, 0);
  for (int j = y0; j < y1; ++j)
    for (int i = x0; i < x1; ++i) mask_[index(i, j)] = 1;
  container_count_ = static_cast<int>(std::count(mask_.begin(), mask_.end(), 1));
  if (kind == ContainerKind::halfplane) {
    cx0_ = -kInf;
    cx1_ = kInf;
    cy0_ = y0 * h;
    cy1_ = kInf;
  } else {
    cx0_ = x0 * h;
    cx1_ = x1 * h;
    cy0_ = y0 * h;
    cy1_ = y1 * h;
  }
}

GridDomain GridDomain::halfplane(int width, int height, int margin, double h) {
  if (width <= 0 || height <= 0 || margin < 0) throw DomainError("halfplane container needs positive extents");
  if (2 * margin < std::max(width, height))
    throw DomainError("grid margin must be at least half the container extent");
  const int box_w = width + 2 * margin;
  const int box_h = height + 2 * margin;
  return GridDomain(ContainerKind::halfplane, box_w, box_h, h, 0, box_w, margin, box_h);
}

GridDomain GridDomain::rectangle(int width, int height, int margin, double h) {
  if (width <= 0 || height <= 0 || margin < 0) throw DomainError("rectangle container needs positive extents");
  if (2 * margin < std::max(width, height))
    throw DomainError("grid margin must be at least half the container extent");
  return GridDomain(ContainerKind::rectangle, width + 2 * margin, height + 2 * margin, h, margin, margin + width,
                    margin, margin + height);
}

GridDomain GridDomain::from_mask(int box_width, int box_height, double h, std::vector<std::uint8_t> mask) {
  if (box_width <= 0 || box_height <= 0 || mask.size() != static_cast<std::size_t>(box_width) * box_height)
    throw DomainError("container mask does not match the box extents");
  int x0 = box_width, x1 = -1, y0 = box_height, y1 = -1;
  for (int j = 0; j < box_height; ++j)
    for (int i = 0; i < box_width; ++i)
      if (mask[j * box_width + i]) {
        x0 = std::min(x0, i), x1 = std::max(x1, i);
        y0 = std::min(y0, j), y1 = std::max(y1, j);
      }
  if (x1 < 0) throw DomainError("container mask is empty");
  ++x1, ++y1;
  for (int j = 0; j < box_height; ++j)
    for (int i = 0; i < box_width; ++i) {
      const bool inside = i >= x0 && i < x1 && j >= y0 && j < y1;
      if (inside != (mask[j * box_width + i] != 0))
        throw DomainError("container mask is not a halfplane or rectangle");
    }
  const bool halfplane = x0 == 0 && x1 == box_width && y1 == box_height && y0 > 0;
  return GridDomain(halfplane ? ContainerKind::halfplane : ContainerKind::rectangle, box_width, box_height, h, x0,
                    x1, y0, y1);
}

double GridDomain::distance_to_container_boundary(double x, double y) const noexcept {
  return std::min({x - cx0_, cx1_ - x, y - cy0_, cy1_ - y});
}

DropletState make_state(const GridDomain& grid, std::span<const int> cells) {
  DropletState state;
  state.occupancy.assign(grid.cell_count(), 0);
  for (int c : cells) {
    if (c < 0 || c >= grid.cell_count() || !grid.in_container(c))
      throw DomainError("droplet cell lies outside the container");
    if (state.occupancy[c]) throw DomainError("droplet cell listed twice");
    state.occupancy[c] = 1;
    ++state.volume_cells;
  }
  return state;
}

std::vector<int> cells_of(const DropletState& state) {
  std::vector<int> out;
  out.reserve(state.volume_cells);
  for (std::size_t i = 0; i < state.occupancy.size(); ++i)
    if (state.occupancy[i]) out.push_back(static_cast<int>(i));
  return out;
}

DropletState initial_cap(const GridDomain& grid, int m) {
  if (m < 0 || m > grid.container_cells()) throw DomainError("droplet volume exceeds the container");
  double cx = 0.0;
  double cy = grid.container_y0();
  if (grid.kind() == ContainerKind::halfplane)
    cx = 0.5 * grid.width() * grid.spacing();
  else
    cx = 0.5 * (grid.container_x0() + grid.container_x1());
  std::vector<std::pair<double, int>> ranked;
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (!grid.in_container(c)) continue;
    const double dx = grid.center_x(c) - cx;
    const double dy = grid.center_y(c) - cy;
    ranked.emplace_back(dx * dx + dy * dy, c);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> cells;
  for (int k = 0; k < m; ++k) cells.push_back(ranked[k].second);
  return make_state(grid, cells);
}

DropletState random_state(const GridDomain& grid, int m, std::uint64_t seed) {
  if (m < 0 || m > grid.container_cells()) throw DomainError("droplet volume exceeds the container");
  std::vector<int> pool;
  for (int c = 0; c < grid.cell_count(); ++c)
    if (grid.in_container(c)) pool.push_back(c);
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates with raw 64-bit draws for platform independence
  for (int k = 0; k < m; ++k) {
    const auto span = static_cast<std::uint64_t>(pool.size() - k);
    const auto pick = static_cast<std::size_t>(k + rng() % span);
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(m);
  return make_state(grid, pool);
}

void write_snapshot(std::ostream& out, const GridDomain& grid, const DropletState& state) {
  out << grid.width() << ' ' << grid.height() << ' ' << format_double(grid.spacing()) << '\n';
  std::string line(grid.width(), '.');
  for (int j = grid.height() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.width(); ++i) {
      const int c = grid.index(i, j);
      line[i] = state.occupancy[c] ? 'E' : (grid.in_container(c) ? 'C' : '.');
    }
    out << line << '\n';
  }
}

std::pair<GridDomain, DropletState> read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("snapshot is empty");
  std::istringstream hs(header);
  int w = 0, h = 0;
  double spacing = 0.0;
  std::string extra;
  if (!(hs >> w >> h >> spacing) || (hs >> extra) || w <= 0 || h <= 0 || !(spacing > 0.0))
    throw DomainError("snapshot header must read `W H h` with positive values");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> cells;
  std::string line;
  for (int row = 0; row < h; ++row) {
    if (!std::getline(in, line)) throw DomainError("snapshot has fewer rows than its header states");
    if (static_cast<int>(line.size()) != w) throw DomainError("snapshot row " + std::to_string(row + 1) + " has the wrong width");
    const int j = h - 1 - row;
    for (int i = 0; i < w; ++i) {
      const char ch = line[i];
      const int c = j * w + i;
      if (ch == 'C' || ch == 'E') mask[c] = 1;
      else if (ch != '.') throw DomainError(std::string("unexpected snapshot character '") + ch + "'");
      if (ch == 'E') cells.push_back(c);
    }
  }
  if (std::getline(in, line) && !line.empty()) throw DomainError("snapshot has trailing content");
  GridDomain grid = GridDomain::from_mask(w, h, spacing, std::move(mask));
  DropletState state = make_state(grid, cells);
  return {std::move(grid), std::move(state)};
}

void write_trace(std::ostream& out, std::span<const TracePoint> trace) {
  out << "step,best_energy\n";
  for (const auto& p : trace) out << p.step << ',' << format_double(p.best_energy) << '\n';
}

}  // namespace nlcap::droplet
