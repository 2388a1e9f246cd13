#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"
#include "oracles.hpp"

using namespace nlcap;
using namespace nlcap::droplet;
constexpr double kPi = std::numbers::pi;

namespace {

ContactAngleProblem iso(double s, double sigma) { return ContactAngleProblem::single(FractionalKernel(2, s), sigma); }

std::vector<int> half_disk(const GridDomain& grid, double radius) {
  std::vector<int> cells;
  const double cx = 0.5 * grid.width() * grid.spacing(), wall = grid.container_y0();
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (!grid.in_container(c)) continue;
    const double dx = grid.center_x(c) - cx, dy = grid.center_y(c) - wall;
    if (dx * dx + dy * dy <= radius * radius) cells.push_back(c);
  }
  return cells;
}

// Cells of the container whose (column, row above wall) satisfy `inside`.
template <class Pred>
DropletState shape(const GridDomain& grid, Pred inside) {
  std::vector<int> cells;
  for (int c = 0; c < grid.cell_count(); ++c)
    if (grid.in_container(c) && inside(grid.column(c), grid.row(c) - grid.wall_row())) cells.push_back(c);
  return make_state(grid, cells);
}

oracle::RayScene scene_of(const GridDomain& grid) {
  oracle::RayScene sc;
  sc.width = grid.width();
  sc.height = grid.height();
  sc.h = grid.spacing();
  sc.source.assign(grid.cell_count(), 0);
  sc.target.assign(grid.cell_count(), 0);
  return sc;
}

}  // namespace

TEST_CASE("grid construction") {
  auto g = GridDomain::halfplane(32, 32, 16);
  CHECK(g.width() == 64);
  CHECK(g.height() == 64);
  CHECK(g.wall_row() == 16);
  CHECK(g.container_cells() == 64 * 48);
  auto r = GridDomain::rectangle(10, 6, 5);
  CHECK(r.container_cells() == 60);
  CHECK_THROWS_AS(GridDomain::halfplane(32, 32, 8), DomainError);
  CHECK_THROWS_AS(GridDomain::rectangle(4, 4, 2, 0.0), DomainError);
  std::vector<std::uint8_t> mask(r.container_mask().begin(), r.container_mask().end());
  auto back = GridDomain::from_mask(r.width(), r.height(), 1.0, mask);
  CHECK(back.kind() == ContainerKind::rectangle);
  CHECK(back.container_cells() == 60);
}

TEST_CASE("pair weights") {
  auto grid = GridDomain::rectangle(16, 16, 8);
  FractionalKernel k(2, 0.5);
  PairWeights w(grid, k);
  SUBCASE("cells five apart are close to the centre value") {
    CHECK(w(5, 0) == doctest::Approx(0.25 / std::pow(5.0, 2.5)).epsilon(0.03));
    CHECK(w(5, 0) == doctest::Approx(w(-5, 0)).epsilon(1e-14));
    CHECK(w(0, 5) == doctest::Approx(w(5, 0)).epsilon(1e-12));
  }
  SUBCASE("exact cell-pair integrals against the ray oracle") {
    for (auto [dx, dy] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 1}, {5, 0}}) {
      auto sc = scene_of(grid);
      const int a = grid.index(8, 8), b = grid.index(8 + dx, 8 + dy);
      sc.source[a] = 1;
      sc.target[b] = 1;
      const double ref = oracle::continuum_interaction(sc, 0.5, 12, 2048);
      CHECK(w(dx, dy) == doctest::Approx(ref).epsilon(2e-3));
    }
  }
  SUBCASE("scaling with h") {
    auto fine = GridDomain::rectangle(16, 16, 8, 0.5);
    PairWeights wf(fine, k);
    CHECK(wf(3, 2) == doctest::Approx(std::pow(0.5, 1.5) * w(3, 2)).epsilon(1e-12));
  }
}

TEST_CASE("interaction_energy") {
  auto grid = GridDomain::rectangle(16, 16, 8);
  FractionalKernel k(2, 0.4);
  std::vector<int> x{grid.index(3, 3), grid.index(4, 3)}, y{grid.index(10, 3)}, z{grid.index(3, 12), grid.index(7, 7)};
  std::vector<int> none;
  CHECK(interaction_energy(grid, x, none, k) == 0.0);
  CHECK(interaction_energy(grid, none, y, k) == 0.0);
  std::vector<int> yz = y;
  yz.insert(yz.end(), z.begin(), z.end());
  CHECK(interaction_energy(grid, x, yz, k) ==
        doctest::Approx(interaction_energy(grid, x, y, k) + interaction_energy(grid, x, z, k)).epsilon(1e-14));
  CHECK(interaction_energy(grid, x, z, k) == doctest::Approx(interaction_energy(grid, z, x, k)).epsilon(1e-14));
  CHECK_THROWS_AS(interaction_energy(grid, x, x, k), DomainError);
}

TEST_CASE("capillarity_energy") {
  auto grid = GridDomain::halfplane(20, 10, 10);
  SUBCASE("empty droplet") {
    auto e = capillarity_energy(grid, make_state(grid, std::vector<int>{}), iso(0.5, 0.5));
    CHECK(e.liquid_gas == 0.0);
    CHECK(e.liquid_solid == 0.0);
    CHECK(e.total == 0.0);
  }
  const auto cells = half_disk(grid, 10.0);
  const auto state = make_state(grid, cells);
  SUBCASE("sigma = 0 keeps only the liquid-gas term") {
    auto e = capillarity_energy(grid, state, iso(0.5, 0.0));
    CHECK(e.total == e.liquid_gas);
  }
  SUBCASE("half-disk fixture") {
    auto e = capillarity_energy(grid, state, iso(0.5, 0.5));
    CHECK(cells.size() == 158);
    CHECK(e.liquid_gas == doctest::Approx(183.916897).epsilon(1e-8));
    CHECK(e.liquid_solid == doctest::Approx(133.018727).epsilon(1e-8));
    CHECK(e.total == doctest::Approx(250.426261).epsilon(1e-8));

    // continuum value of the same union of squares
    const double s = 0.5, wall = grid.container_y0();
    auto gas = scene_of(grid);
    gas.source = state.occupancy;
    for (int c = 0; c < grid.cell_count(); ++c) gas.target[c] = grid.in_container(c) && !state.occupancy[c];
    auto solid = gas;
    for (int c = 0; c < grid.cell_count(); ++c) solid.target[c] = !grid.in_container(c);
    gas.beyond_box = [&](double, double py, double, double d, double te) {
      if (d >= 0.0) return std::pow(te, -s) / s;
      const double tw = (py - wall) / -d;
      return te < tw ? (std::pow(te, -s) - std::pow(tw, -s)) / s : 0.0;
    };
    solid.beyond_box = [&](double, double py, double, double d, double te) {
      if (d >= 0.0) return 0.0;
      return std::pow(std::max(te, (py - wall) / -d), -s) / s;
    };
    const double lg = oracle::continuum_interaction(gas, s, 6, 512);
    const double ls = oracle::continuum_interaction(solid, s, 6, 512);
    CHECK(std::abs(e.liquid_gas / lg - 1.0) < 0.01);
    CHECK(std::abs(e.liquid_solid / ls - 1.0) < 0.01);
    CHECK(std::abs(e.total / (lg + 0.5 * ls) - 1.0) < 0.01);
  }
}

TEST_CASE("incremental energy deltas match full recomputation") {
  auto grid = GridDomain::halfplane(16, 16, 8);
  for (double sigma : {-0.6, 0.0, 0.7}) {
    EnergyModel model(grid, iso(0.6, sigma));
    auto state = random_state(grid, 60, 11);
    auto u = model.droplet_potential(state);
    std::mt19937_64 rng(3);
    int checked = 0;
    while (checked < 100) {
      const int from = static_cast<int>(rng() % grid.cell_count());
      const int to = static_cast<int>(rng() % grid.cell_count());
      if (!state.occupancy[from] || !grid.in_container(to) || state.occupancy[to]) continue;
      const double before = model.breakdown(state).total;
      const double delta = model.swap_delta(u, from, to);
      state.occupancy[from] = 0;
      state.occupancy[to] = 1;
      model.update_potential(u, from, to);
      const double full = model.breakdown(state).total - before;
      CHECK(std::abs(delta - full) <= 1e-9 * std::max(std::abs(full), 1e-3 * std::abs(before)));
      ++checked;
    }
  }
}

TEST_CASE("complement duality on the truncated container") {
  // E_sigma(E) - E_{-sigma}(Omega \ E) = sigma I(Omega, R^2 \ Omega), the same for every E
  auto grid = GridDomain::halfplane(12, 12, 6);
  const double sigma = 0.4;
  EnergyOptions opts;
  opts.gas_tail = false;
  std::vector<double> diffs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto e = random_state(grid, 40 + 7 * static_cast<int>(seed), seed);
    std::vector<int> rest;
    for (int c = 0; c < grid.cell_count(); ++c)
      if (grid.in_container(c) && !e.occupancy[c]) rest.push_back(c);
    const double a = capillarity_energy(grid, e, iso(0.5, sigma), opts).total;
    const double b = capillarity_energy(grid, make_state(grid, rest), iso(0.5, -sigma), opts).total;
    diffs.push_back(a - b);
  }
  for (double d : diffs) CHECK(d == doctest::Approx(diffs.front()).epsilon(1e-6));
}

TEST_CASE("minimize") {
  auto grid = GridDomain::halfplane(32, 32, 16);
  AnnealSchedule quick;
  quick.levels = 15;
  quick.steps_per_level = 500;

  SUBCASE("deterministic, volume-preserving, monotone trace") {
    long steps = 0;
    bool volume_ok = true;
    auto observer = [&](long, const DropletState& st) {
      ++steps;
      int count = 0;
      for (auto v : st.occupancy) count += v;
      volume_ok = volume_ok && count == 120 && st.volume_cells == 120;
    };
    auto a = minimize(grid, 120, iso(0.6, 0.2), quick, observer);
    auto b = minimize(grid, 120, iso(0.6, 0.2), quick);
    CHECK(steps == 15L * 500);
    CHECK(volume_ok);
    CHECK(a.state == b.state);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].best_energy <= a.trace[i - 1].best_energy);
    CHECK(a.energy.total == doctest::Approx(a.trace.back().best_energy).epsilon(1e-12));
    CHECK(a.energy.total < capillarity_energy(grid, initial_cap(grid, 120), iso(0.6, 0.2)).total);
    quick.rng_seed = 2;
    CHECK_FALSE(minimize(grid, 120, iso(0.6, 0.2), quick).state == a.state);
  }
  SUBCASE("full container leaves nothing to move") {
    auto box = GridDomain::rectangle(6, 6, 3);
    auto r = minimize(box, box.container_cells(), iso(0.5, 0.0), quick);
    CHECK(r.energy.liquid_gas == 0.0);
    CHECK(r.accepted_moves == 0);
  }
  SUBCASE("infeasible volume") {
    CHECK_THROWS_AS(minimize(grid, grid.container_cells() + 1, iso(0.5, 0.0)), DomainError);
    AnnealSchedule bad;
    bad.cooling_factor = 1.5;
    CHECK_THROWS_AS(minimize(grid, 10, iso(0.5, 0.0), bad), DomainError);
  }
  SUBCASE("hydrophobic droplets stand taller") {
    auto up = minimize(grid, 200, iso(0.75, 0.6));
    auto down = minimize(grid, 200, iso(0.75, -0.6));
    const auto a = measure_contact_angle(grid, up.state).theta;
    const auto b = measure_contact_angle(grid, down.state).theta;
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a > *b);
  }
}

TEST_CASE("measure_contact_angle") {
  auto grid = GridDomain::halfplane(32, 32, 16);
  SUBCASE("vertical block") {
    auto st = shape(grid, [](int i, int k) { return i >= 24 && i < 40 && k < 12; });
    auto m = measure_contact_angle(grid, st, AngleFit::line);
    REQUIRE(m.theta);
    CHECK(std::abs(*m.theta - kPi / 2) < 0.02);
  }
  SUBCASE("45 degree wedge") {
    auto st = shape(grid, [](int i, int k) { return i >= 17 + k && i < 47 - k; });
    auto m = measure_contact_angle(grid, st, AngleFit::line);
    REQUIRE(m.left);
    REQUIRE(m.right);
    CHECK(std::abs(*m.left - kPi / 4) < 0.05);
    CHECK(std::abs(*m.right - kPi / 4) < 0.05);
  }
  SUBCASE("half-disk through the cap fit") {
    auto st = make_state(grid, half_disk(grid, 12.0));
    CHECK(std::abs(*measure_contact_angle(grid, st).theta - kPi / 2) < 1.0 * kPi / 180);
  }
  SUBCASE("dry droplet") {
    auto st = shape(grid, [](int i, int k) { return i >= 28 && i < 36 && k >= 4 && k < 10; });
    auto m = measure_contact_angle(grid, st);
    CHECK_FALSE(m.wet);
    CHECK_FALSE(m.theta);
  }
  SUBCASE("needs a halfplane") {
    auto box = GridDomain::rectangle(8, 8, 4);
    CHECK_THROWS_AS(measure_contact_angle(box, initial_cap(box, 4)), DomainError);
  }
}

TEST_CASE("el_residual") {
  auto grid = GridDomain::halfplane(32, 32, 16);
  SUBCASE("flat film on a fully wetting wall is critical") {
    // sigma = -1 turns E together with the solid into a halfplane
    for (double s : {0.5, 0.75}) {
      auto st = shape(grid, [](int, int k) { return k < 8; });
      auto el = el_residual(grid, st, iso(s, -1.0));
      const double scale = container_exterior_tail(grid, FractionalKernel(2, s), 32.5, 24.0);
      for (const auto& v : el.values)
        if (v.x == 32.5) CHECK(std::abs(v.value) < 0.1 * scale);
    }
  }
  SUBCASE("minimizer against a perturbed copy") {
    auto problem = iso(0.75, 0.0);
    auto r = minimize(grid, 200, problem);
    auto el = el_residual(grid, r.state, problem);
    CHECK(el.spread < 4.0);
    std::mt19937_64 rng(5);
    auto st = r.state;
    auto cells = cells_of(st);
    int moved = 0;
    while (moved < 6) {
      const int c = cells[rng() % cells.size()];
      const int i = grid.column(c), j = grid.row(c);
      if (!st.occupancy[c] || j == grid.wall_row() || st.occupancy[grid.index(i, j + 1)] ||
          st.occupancy[grid.index(i, j + 3)])
        continue;
      st.occupancy[c] = 0;
      st.occupancy[grid.index(i, j + 3)] = 1;
      ++moved;
    }
    auto bumped = el_residual(grid, st, problem);
    CHECK(bumped.max - bumped.min > 2.0 * (el.max - el.min));
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(el_residual(grid, make_state(grid, std::vector<int>{}), iso(0.5, 0.0)), DomainError);
  }
}

TEST_CASE("density_check") {
  auto grid = GridDomain::halfplane(32, 32, 16);
  auto st = shape(grid, [](int, int k) { return k < 20; });
  const double top = grid.container_y0() + 20.0;
  std::vector<double> r_small{1.5}, r8{8.0};
  std::vector<std::pair<double, double>> inside{{32.0, top - 6.0}}, edge{{32.0, top}};
  CHECK(density_check(grid, st, r_small, inside).min == doctest::Approx(1.0));
  auto half = density_check(grid, st, r8, edge);
  CHECK(std::abs(half.min - 0.5) < 0.1);
  std::vector<double> bad{0.0};
  CHECK_THROWS_AS(density_check(grid, st, bad, edge), DomainError);

  auto cap = make_state(grid, half_disk(grid, 10.0));
  std::vector<double> radii{6.0, 10.0};
  auto rep = density_check(grid, cap, radii);
  CHECK(rep.samples.size() == 2 * interface_points(grid, cap).size());
  CHECK(rep.min >= 0.05);
  CHECK(rep.max <= 0.95);
}

TEST_CASE("classical_limit_check") {
  auto grid = GridDomain::rectangle(32, 32, 16);
  auto sq = centered_square(grid, 16);
  std::vector<double> s{0.9, 0.95, 0.99};
  auto rows = classical_limit_check(grid, sq, s);
  for (const auto& r : rows) {
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.perimeter == doctest::Approx(64.0));
  }
  CHECK(std::abs(rows[2].ratio - rows[1].ratio) < std::abs(rows[1].ratio - rows[0].ratio));

  std::vector<double> half{0.5};
  auto fine = GridDomain::rectangle(64, 64, 32, 0.5);
  const double coarse_ratio = classical_limit_check(grid, sq, half)[0].ratio;
  const double fine_ratio = classical_limit_check(fine, centered_square(fine, 32), half)[0].ratio;
  CHECK(std::abs(fine_ratio / coarse_ratio - 1.0) < 0.05);
}

TEST_CASE("snapshot and trace files") {
  auto grid = GridDomain::halfplane(8, 8, 4, 0.5);
  auto st = initial_cap(grid, 12);
  std::stringstream io;
  write_snapshot(io, grid, st);
  auto [g2, s2] = read_snapshot(io);
  CHECK(s2 == st);
  CHECK(g2.spacing() == 0.5);
  CHECK(g2.kind() == ContainerKind::halfplane);

  std::istringstream broken("4 2 1\n....\n..X.\n");
  CHECK_THROWS_AS(read_snapshot(broken), DomainError);
  std::istringstream short_rows("4 3 1\n....\n");
  CHECK_THROWS_AS(read_snapshot(short_rows), DomainError);

  std::vector<TracePoint> trace{{0, 3.5}, {10, 2.25}};
  std::ostringstream out;
  write_trace(out, trace);
  CHECK(out.str() == "step,best_energy\n0,3.5\n10,2.25\n");
}
