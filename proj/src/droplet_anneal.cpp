#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"

namespace nlcap::droplet {

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbors = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr int kPickAttempts = 64;
constexpr int kProbeMoves = 100;

// Raw 64-bit draws keep runs identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class Chain {
 public:
  Chain(const GridDomain& grid, DropletState state) : grid_(grid), state_(std::move(state)) {
    slot_.assign(grid.cell_count(), -1);
    for (int c : cells_of(state_)) {
      slot_[c] = static_cast<int>(cells_.size());
      cells_.push_back(c);
    }
  }

  const DropletState& state() const noexcept { return state_; }

  bool is_free(int c) const noexcept { return grid_.in_container(c) && !state_.occupancy[c]; }

  int neighbor(int c, int k) const noexcept {
    const int i = grid_.column(c) + kNeighbors[k][0];
    const int j = grid_.row(c) + kNeighbors[k][1];
    return grid_.contains(i, j) ? grid_.index(i, j) : -1;
  }

  bool on_boundary(int c) const noexcept {
    for (int k = 0; k < 4; ++k) {
      const int nb = neighbor(c, k);
      if (nb >= 0 && is_free(nb)) return true;
    }
    return false;
  }

  // One droplet cell with an empty container neighbour, and one empty
  // container cell next to the droplet.
  bool propose(Rng& rng, int& from, int& to) const {
    if (cells_.empty()) return false;
    from = -1;
    for (int t = 0; t < kPickAttempts && from < 0; ++t) {
      const int c = cells_[rng.below(cells_.size())];
      if (on_boundary(c)) from = c;
    }
    if (from < 0) return false;
    to = -1;
    for (int t = 0; t < kPickAttempts && to < 0; ++t) {
      const int c = cells_[rng.below(cells_.size())];
      const int nb = neighbor(c, static_cast<int>(rng.below(4)));
      if (nb >= 0 && is_free(nb)) to = nb;
    }
    return to >= 0;
  }

  void apply(int from, int to) {
    state_.occupancy[from] = 0;
    state_.occupancy[to] = 1;
    const int s = slot_[from];
    cells_[s] = to;
    slot_[to] = s;
    slot_[from] = -1;
  }

 private:
  const GridDomain& grid_;
  DropletState state_;
  std::vector<int> cells_;
  std::vector<int> slot_;
};

}  // namespace

MinimizeResult minimize(const GridDomain& grid, int m, const ContactAngleProblem& problem,
                        const AnnealSchedule& schedule, const StepObserver& observer) {
  if (m < 0 || m > grid.container_cells()) throw DomainError("droplet volume is infeasible for this container");
  if (!(schedule.cooling_factor > 0.0 && schedule.cooling_factor < 1.0))
    throw DomainError("cooling factor must lie in (0, 1)");
  if (schedule.steps_per_level <= 0 || schedule.levels <= 0)
    throw DomainError("annealing schedule needs positive steps and levels");
  if (!(schedule.temperature_factor > 0.0)) throw DomainError("temperature factor must be positive");
  if (schedule.initial_temperature && !(*schedule.initial_temperature > 0.0))
    throw DomainError("initial temperature must be positive");

  const EnergyModel model(grid, problem);
  Chain chain(grid, initial_cap(grid, m));
  Rng rng(schedule.rng_seed);

  MinimizeResult result;
  double energy = model.breakdown(chain.state()).total;
  double best = energy;
  DropletState best_state = chain.state();
  result.trace.push_back({0, best});

  auto potential = model.droplet_potential(chain.state());

  double temperature = 0.0;
  if (schedule.initial_temperature) {
    temperature = *schedule.initial_temperature;
  } else {
    std::vector<double> probes;
    for (int k = 0; k < kProbeMoves; ++k) {
      int from = 0, to = 0;
      if (chain.propose(rng, from, to)) probes.push_back(std::abs(model.swap_delta(potential, from, to)));
    }
    if (!probes.empty()) {
      auto mid = probes.begin() + static_cast<std::ptrdiff_t>(probes.size() / 2);
      std::nth_element(probes.begin(), mid, probes.end());
      temperature = schedule.temperature_factor * *mid;
    }
    if (!(temperature > 0.0)) temperature = 1e-12;
  }
  result.initial_temperature = temperature;

  long step = 0;
  for (int level = 0; level < schedule.levels; ++level) {
    for (int k = 0; k < schedule.steps_per_level; ++k) {
      ++step;
      int from = 0, to = 0;
      if (chain.propose(rng, from, to)) {
        const double delta = model.swap_delta(potential, from, to);
        const double u = rng.uniform();
        if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
          chain.apply(from, to);
          model.update_potential(potential, from, to);
          energy += delta;
          ++result.accepted_moves;
          if (energy < best) {
            best = energy;
            best_state = chain.state();
          }
        }
      }
      if (observer) observer(step, chain.state());
    }
    result.trace.push_back({step, best});
    temperature *= schedule.cooling_factor;
  }

  result.state = std::move(best_state);
  result.energy = model.breakdown(result.state);
  return result;
}

}  // namespace nlcap::droplet
