#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nlcap/kernel.hpp"
#include "nlcap/wedge.hpp"

namespace nlcap::droplet {

enum class ContainerKind { halfplane, rectangle };

/// Cell-centred lattice over the box [0, W h] x [0, H h].
///
/// Cell (i, j) has centre ((i + 1/2) h, (j + 1/2) h); row j = 0 is the bottom.
class GridDomain {
 public:
  /// Container window of `width` x `height` cells above a wall, with `margin`
  /// cells of box on every side. Every box cell above the wall belongs to the
  /// container (the container is the halfplane {y > margin h}).
  static GridDomain halfplane(int width, int height, int margin, double h = 1.0);
  /// Closed box container of `width` x `height` cells surrounded by `margin`
  /// cells of solid.
  static GridDomain rectangle(int width, int height, int margin, double h = 1.0);
  /// Rebuilds a domain from a container mask; the mask must describe one of
  /// the built-in shapes.
  static GridDomain from_mask(int box_width, int box_height, double h, std::vector<std::uint8_t> mask);

  int width() const noexcept { return box_w_; }
  int height() const noexcept { return box_h_; }
  int cell_count() const noexcept { return box_w_ * box_h_; }
  double spacing() const noexcept { return h_; }
  ContainerKind kind() const noexcept { return kind_; }

  int index(int i, int j) const noexcept { return j * box_w_ + i; }
  int column(int idx) const noexcept { return idx % box_w_; }
  int row(int idx) const noexcept { return idx / box_w_; }
  double center_x(int idx) const noexcept { return (column(idx) + 0.5) * h_; }
  double center_y(int idx) const noexcept { return (row(idx) + 0.5) * h_; }
  bool contains(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < box_w_ && j < box_h_; }

  bool in_container(int idx) const noexcept { return mask_[idx] != 0; }
  std::span<const std::uint8_t> container_mask() const noexcept { return mask_; }
  int container_cells() const noexcept { return container_count_; }

  /// Container in physical coordinates; for the halfplane only `y0` (the
  /// wall height) is meaningful.
  double container_x0() const noexcept { return cx0_; }
  double container_x1() const noexcept { return cx1_; }
  double container_y0() const noexcept { return cy0_; }
  double container_y1() const noexcept { return cy1_; }
  /// Row index of the first container row (halfplane) or bottom container row.
  int wall_row() const noexcept { return wall_row_; }

  /// Distance from a point inside the container to its boundary.
  double distance_to_container_boundary(double x, double y) const noexcept;

 private:
  GridDomain(ContainerKind kind, int box_w, int box_h, double h, int x0, int x1, int y0, int y1);

  ContainerKind kind_;
  int box_w_;
  int box_h_;
  double h_;
  int wall_row_;
  double cx0_, cx1_, cy0_, cy1_;
  std::vector<std::uint8_t> mask_;
  int container_count_ = 0;
};

/// Droplet E as a set of container cells.
struct DropletState {
  std::vector<std::uint8_t> occupancy;
  int volume_cells = 0;

  bool operator==(const DropletState&) const = default;
};

DropletState make_state(const GridDomain& grid, std::span<const int> cells);
/// The `m` container cells closest to the centre of the container floor.
DropletState initial_cap(const GridDomain& grid, int m);
/// `m` container cells drawn uniformly at random (deterministic in `seed`).
DropletState random_state(const GridDomain& grid, int m, std::uint64_t seed);
std::vector<int> cells_of(const DropletState& state);

/// Interaction of two lattice cells, indexed by their offset: the exact
/// double integral of K over the cell pair for offsets within 8 cells in
/// both directions, the midpoint value with its h^2 correction beyond. The
/// zero offset carries weight 0.
class PairWeights {
 public:
  PairWeights(const GridDomain& grid, const FractionalKernel& kernel);
  double operator()(int dx, int dy) const noexcept { return table_[(dy + dy_off_) * stride_ + dx + dx_off_]; }

 private:
  int dx_off_;
  int dy_off_;
  int stride_;
  std::vector<double> table_;
};

/// Discrete I(X, Y) = sum over x in X, y in Y of the pair weight. Throws
/// DomainError when X and Y overlap.
double interaction_energy(const GridDomain& grid, std::span<const int> x_cells, std::span<const int> y_cells,
                          const FractionalKernel& kernel);
double interaction_energy(const PairWeights& weights, const GridDomain& grid, std::span<const int> x_cells,
                          std::span<const int> y_cells);

/// Integrals of the kernel from a point over regions outside the box, in
/// closed form along each ray with Gauss-Legendre quadrature in the angle.
struct ExteriorTails {
  std::vector<double> gas;            // (Omega \ box), per cell
  std::vector<double> solid;          // (R^2 \ Omega) \ box, per cell
  std::vector<double> outside_box;    // R^2 \ box, per cell
  std::vector<double> container_ext;  // R^2 \ Omega, per cell
};

ExteriorTails exterior_tails(const GridDomain& grid, const FractionalKernel& kernel);
/// Kernel integral from the centre of any box cell over R^2 \ box.
double outside_box_tail(const GridDomain& grid, const FractionalKernel& kernel, int cell);
/// Same from an arbitrary point of the box.
double outside_box_tail(const GridDomain& grid, const FractionalKernel& kernel, double px, double py);
/// Kernel integral over R^2 \ Omega from a point inside the container.
double container_exterior_tail(const GridDomain& grid, const FractionalKernel& kernel, double px, double py);
/// Integral of K over the rectangle [x0, x1] x [y0, y1] seen from the
/// origin, which must lie outside the open rectangle. Exact ray integration
/// near the origin, corrected midpoint far away.
double cell_integral(const FractionalKernel& kernel, double x0, double x1, double y0, double y1);

struct EnergyBreakdown {
  double liquid_gas = 0.0;
  double liquid_solid = 0.0;
  double total = 0.0;
};

struct EnergyOptions {
  /// Count gas beyond the box (the container continues past it). Off means
  /// the container is truncated to the box.
  bool gas_tail = true;
};

/// Precomputed weights and tails for repeated evaluation on one grid.
class EnergyModel {
 public:
  EnergyModel(const GridDomain& grid, const ContactAngleProblem& problem, EnergyOptions opts = {});

  const GridDomain& grid() const noexcept { return grid_; }
  double sigma() const noexcept { return sigma_; }
  const PairWeights& liquid_gas_weights() const noexcept { return w1_; }

  EnergyBreakdown breakdown(const DropletState& state) const;

  /// Potential of E under the liquid-gas weights: U(x) = sum_{y in E} w1(x - y).
  std::vector<double> droplet_potential(const DropletState& state) const;
  /// Energy change of removing `from` from E and adding `to`, given U for E.
  double swap_delta(std::span<const double> potential, int from, int to) const;
  /// Applies the swap to U in place.
  void update_potential(std::vector<double>& potential, int from, int to) const;

  /// Per-cell liquid-gas self potential P and liquid-solid potential Q.
  std::span<const double> gas_potential() const noexcept { return gas_; }
  std::span<const double> solid_potential() const noexcept { return solid_; }
  const ExteriorTails& tails1() const noexcept { return tails1_; }
  const ExteriorTails& tails2() const noexcept { return tails2_; }

 private:
  GridDomain grid_;
  double sigma_;
  bool gas_tail_;
  PairWeights w1_;
  PairWeights w2_;
  ExteriorTails tails1_;
  ExteriorTails tails2_;
  std::vector<double> gas_;
  std::vector<double> solid_;
};

EnergyBreakdown capillarity_energy(const GridDomain& grid, const DropletState& state,
                                   const ContactAngleProblem& problem, EnergyOptions opts = {});

struct AnnealSchedule {
  /// Unset: `temperature_factor` times the median |delta| of 100 probe moves.
  std::optional<double> initial_temperature;
  double temperature_factor = 1.0;
  double cooling_factor = 0.95;
  int steps_per_level = 2000;
  int levels = 60;
  std::uint64_t rng_seed = 1;
};

struct TracePoint {
  long step = 0;
  double best_energy = 0.0;
};

struct MinimizeResult {
  DropletState state;
  EnergyBreakdown energy;
  std::vector<TracePoint> trace;
  double initial_temperature = 0.0;
  long accepted_moves = 0;
};

/// Called after every proposal with the step number and current state.
using StepObserver = std::function<void(long, const DropletState&)>;

/// Volume-preserving Metropolis annealing from the initial cap.
MinimizeResult minimize(const GridDomain& grid, int m, const ContactAngleProblem& problem,
                        const AnnealSchedule& schedule = {}, const StepObserver& observer = {});

struct ElSample {
  int cell = 0;      // droplet cell on the inner side of the edge
  double x = 0.0;    // edge midpoint
  double y = 0.0;
  double value = 0.0;
};

struct ElResidual {
  std::vector<ElSample> values;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double spread = 0.0;  // (max - min) / |median|
};

/// Euler-Lagrange residual H_E - int_{R^2 \ Omega} K1 + sigma int_{R^2 \ Omega} K2
/// at the midpoints of the edges between E and the empty container, for
/// edges more than 3h from the container boundary.
ElResidual el_residual(const GridDomain& grid, const DropletState& state, const ContactAngleProblem& problem);

enum class AngleFit {
  /// Circle through the free interface away from the wall; the angle is
  /// where that circle meets the wall.
  cap,
  /// Straight lines through the interface next to each contact point.
  line,
};

struct ContactAngleMeasurement {
  std::optional<double> theta;  // from the requested fit
  std::optional<double> left;   // line fit, left contact point
  std::optional<double> right;  // line fit, right contact point
  bool wet = false;
};

/// Contact angle of a droplet on a halfplane container. The line fits use
/// the leftmost/rightmost droplet cell of each row 2..7 above the wall,
/// within 16 columns of the contact cell.
ContactAngleMeasurement measure_contact_angle(const GridDomain& grid, const DropletState& state,
                                              AngleFit fit = AngleFit::cap);

struct DensitySample {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double ratio = 0.0;
};

struct DensityReport {
  std::vector<DensitySample> samples;
  double min = 0.0;
  double max = 0.0;
};

/// Interface points of E inside the container: midpoints of edges between a
/// droplet cell and an empty container cell.
std::vector<std::pair<double, double>> interface_points(const GridDomain& grid, const DropletState& state);

DensityReport density_check(const GridDomain& grid, const DropletState& state, std::span<const double> radii);
DensityReport density_check(const GridDomain& grid, const DropletState& state, std::span<const double> radii,
                            std::span<const std::pair<double, double>> points);

struct ClassicalLimitRow {
  double s = 0.0;
  double energy = 0.0;
  double perimeter = 0.0;
  double ratio = 0.0;
};

/// Centered square of `side` cells.
std::vector<int> centered_square(const GridDomain& grid, int side);

/// Discrete fractional perimeter I(shape, R^2 \ shape) over the discrete
/// perimeter, for each s (isotropic kernel, normalization s(1-s)).
std::vector<ClassicalLimitRow> classical_limit_check(const GridDomain& grid, std::span<const int> shape,
                                                     std::span<const double> s_values);

/// Plain-text snapshot: `W H h` then H rows (top first) of `.`, `C`, `E`.
void write_snapshot(std::ostream& out, const GridDomain& grid, const DropletState& state);
std::pair<GridDomain, DropletState> read_snapshot(std::istream& in);

/// CSV `step,best_energy`.
void write_trace(std::ostream& out, std::span<const TracePoint> trace);

}  // namespace nlcap::droplet
