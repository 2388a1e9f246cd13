#include "nlcap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nlcap/asymptotics.hpp"
#include "nlcap/droplet.hpp"
#include "nlcap/error.hpp"
#include "nlcap/format.hpp"
#include "nlcap/kernel.hpp"
#include "nlcap/wedge.hpp"

namespace nlcap::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct KeySpec {
  const char* name;
  const char* help;
};

constexpr KeySpec kKeys[] = {
    {"n", "ambient dimension (integer >= 2)"},
    {"s", "kernel exponent in (0, 1), single-kernel problems"},
    {"s1", "liquid-gas kernel exponent in (0, 1)"},
    {"s2", "liquid-solid kernel exponent in (0, 1)"},
    {"profile", "angular profile of the (first) kernel: iso or ellipse:<e>"},
    {"profile2", "angular profile of the liquid-solid kernel"},
    {"sigma", "relative adhesion coefficient in [-1, 1]"},
    {"tol", "angle tolerance in radians (> 0)"},
    {"seed", "annealing RNG seed (unsigned integer)"},
    {"container", "halfplane or rectangle"},
    {"width", "container width in cells"},
    {"height", "container height in cells"},
    {"margin", "box margin in cells (>= half the container extent)"},
    {"h", "lattice spacing (> 0)"},
    {"m", "droplet volume in cells"},
    {"t0", "initial annealing temperature (> 0); default is probe-calibrated"},
    {"temperature-factor", "multiple of the median probe |delta| used as t0"},
    {"cooling", "cooling factor in (0, 1)"},
    {"steps", "proposals per temperature level"},
    {"levels", "number of temperature levels"},
    {"s-values", "comma-separated s values for sweep"},
    {"sigma-values", "comma-separated sigma values for sweep"},
    {"output", "output file"},
    {"trace", "trace CSV file (minimize)"},
    {"input", "snapshot file (energy)"},
};

bool known_key(const std::string& key) {
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeySpec& k) { return key == k.name; });
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

using RawValues = std::map<std::string, std::string>;

RawValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  RawValues values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!known_key(key)) throw ConfigError(key, "unknown key in " + path + ":" + std::to_string(lineno));
    if (values.count(key)) throw ConfigError(key, "given twice in " + path);
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v) || text.empty())
    throw ConfigError(key, "expected a real number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of reals");
  return out;
}

double exponent_in_range(const std::string& key, double v) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(key, "must lie in (0, 1), got " + format_double(v));
  return v;
}

double sigma_in_range(const std::string& key, double v) {
  if (!(std::abs(v) <= 1.0)) throw ConfigError(key, "must lie in [-1, 1], got " + format_double(v));
  return v;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0, got " + format_double(v));
  return v;
}

int int_at_least(const std::string& key, long long v, long long lo) {
  if (v < lo || v > 1'000'000'000) throw ConfigError(key, "must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

Command to_command(const std::string& name) {
  static const std::map<std::string, Command> table = {
      {"angle", Command::angle},       {"sweep", Command::sweep},       {"regime", Command::regime},
      {"threshold", Command::threshold}, {"minimize", Command::minimize}, {"energy", Command::energy},
      {"validate", Command::validate},
  };
  const auto it = table.find(name);
  if (it == table.end())
    throw ConfigError("command", "unknown command '" + name +
                                     "' (expected angle, sweep, regime, threshold, minimize, energy or validate)");
  return it->second;
}

RunConfig convert(Command command, const RawValues& raw) {
  RunConfig cfg;
  cfg.command = command;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  if (auto v = get("n")) cfg.n = int_at_least("n", to_integer("n", *v), 2);
  if (auto v = get("s")) cfg.s = exponent_in_range("s", to_real("s", *v));
  if (auto v = get("s1")) cfg.s1 = exponent_in_range("s1", to_real("s1", *v));
  if (auto v = get("s2")) cfg.s2 = exponent_in_range("s2", to_real("s2", *v));
  for (const char* key : {"profile", "profile2"}) {
    if (auto v = get(key)) {
      try {
        (void)AngularProfile::parse(*v);
      } catch (const DomainError& e) {
        throw ConfigError(key, e.what());
      }
      (std::string(key) == "profile" ? cfg.profile : cfg.profile2) = *v;
    }
  }
  if (auto v = get("sigma")) cfg.sigma = sigma_in_range("sigma", to_real("sigma", *v));
  if (auto v = get("tol")) cfg.tol = positive("tol", to_real("tol", *v));
  if (auto v = get("seed")) {
    const long long seed = to_integer("seed", *v);
    if (seed < 0) throw ConfigError("seed", "must be a nonnegative integer");
    cfg.seed = static_cast<unsigned long long>(seed);
  }
  if (auto v = get("container")) {
    if (*v != "halfplane" && *v != "rectangle")
      throw ConfigError("container", "must be halfplane or rectangle, got '" + *v + "'");
    cfg.container = *v;
  }
  if (auto v = get("width")) cfg.width = int_at_least("width", to_integer("width", *v), 1);
  if (auto v = get("height")) cfg.height = int_at_least("height", to_integer("height", *v), 1);
  if (auto v = get("margin")) cfg.margin = int_at_least("margin", to_integer("margin", *v), 0);
  if (auto v = get("h")) cfg.h = positive("h", to_real("h", *v));
  if (auto v = get("m")) cfg.m = int_at_least("m", to_integer("m", *v), 0);
  if (auto v = get("t0")) cfg.t0 = positive("t0", to_real("t0", *v));
  if (auto v = get("temperature-factor"))
    cfg.temperature_factor = positive("temperature-factor", to_real("temperature-factor", *v));
  if (auto v = get("cooling")) {
    cfg.cooling = to_real("cooling", *v);
    if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0))
      throw ConfigError("cooling", "must lie in (0, 1), got " + format_double(cfg.cooling));
  }
  if (auto v = get("steps")) cfg.steps = int_at_least("steps", to_integer("steps", *v), 1);
  if (auto v = get("levels")) cfg.levels = int_at_least("levels", to_integer("levels", *v), 1);
  if (auto v = get("s-values")) {
    cfg.s_values = to_list("s-values", *v);
    for (double s : cfg.s_values) exponent_in_range("s-values", s);
  }
  if (auto v = get("sigma-values")) {
    cfg.sigma_values = to_list("sigma-values", *v);
    for (double sg : cfg.sigma_values) sigma_in_range("sigma-values", sg);
  }
  if (auto v = get("output")) cfg.output = *v;
  if (auto v = get("trace")) cfg.trace = *v;
  if (auto v = get("input")) cfg.input = *v;

  // Cross-key requirements.
  const bool two = cfg.s1 || cfg.s2;
  if (two && cfg.s) throw ConfigError("s", "give either s or the pair s1, s2, not both");
  if (two && !(cfg.s1 && cfg.s2)) throw ConfigError(cfg.s1 ? "s2" : "s1", "two-kernel problems need both s1 and s2");
  auto need_kernel = [&] {
    if (!cfg.s && !two) throw ConfigError("s", "missing required key (or give s1 and s2)");
  };
  auto need = [&](bool present, const char* key) {
    if (!present) throw ConfigError(key, "missing required key");
  };
  switch (command) {
    case Command::angle:
    case Command::regime:
      need_kernel();
      need(cfg.sigma.has_value(), "sigma");
      break;
    case Command::threshold:
      need_kernel();
      break;
    case Command::sweep:
      need(!cfg.s_values.empty(), "s-values");
      need(!cfg.sigma_values.empty(), "sigma-values");
      if (cfg.s || two) throw ConfigError("s", "sweep takes s-values, not s");
      break;
    case Command::minimize:
      need_kernel();
      need(cfg.sigma.has_value(), "sigma");
      if (cfg.n != 2) throw ConfigError("n", "the lattice minimizer is planar; n must be 2");
      break;
    case Command::energy:
      need_kernel();
      need(cfg.sigma.has_value(), "sigma");
      need(cfg.input.has_value(), "input");
      if (cfg.n != 2) throw ConfigError("n", "the lattice energy is planar; n must be 2");
      break;
    case Command::validate:
      break;
  }
  return cfg;
}

ContactAngleProblem make_problem(const RunConfig& cfg, double sigma) {
  if (cfg.s1)
    return ContactAngleProblem::two_kernel(FractionalKernel(cfg.n, *cfg.s1, AngularProfile::parse(cfg.profile)),
                                           FractionalKernel(cfg.n, *cfg.s2, AngularProfile::parse(cfg.profile2)),
                                           sigma);
  return ContactAngleProblem::single(FractionalKernel(cfg.n, *cfg.s, AngularProfile::parse(cfg.profile)), sigma);
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions opts;
  opts.tol = cfg.tol;
  return opts;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

// Any open or write failure becomes an IoError.
template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

int run_angle(const RunConfig& cfg, std::ostream& out) {
  const AngleSolution sol = solve_contact_angle(make_problem(cfg, *cfg.sigma), solver_options(cfg));
  const std::optional<double> deg = sol.theta ? std::optional(*sol.theta * 180.0 / kPi) : std::nullopt;
  out << optional_number(sol.theta) << ',' << optional_number(deg) << ',' << to_string(sol.regime) << ','
      << (sol.theta ? format_double(sol.residual) : "nan") << '\n';
  return kOk;
}

int run_regime(const RunConfig& cfg, std::ostream& out) {
  const ContactAngleProblem problem = make_problem(cfg, *cfg.sigma);
  const Regime regime = classify_regime(problem);
  std::optional<double> theta;
  if (regime == Regime::degenerate_zero) theta = 0.0;
  if (regime == Regime::degenerate_pi) theta = kPi;
  if (regime == Regime::interior) theta = solve_contact_angle(problem, solver_options(cfg)).theta;
  out << to_string(regime) << ',' << optional_number(theta) << '\n';
  return kOk;
}

int run_threshold(const RunConfig& cfg, std::ostream& out) {
  const ContactAngleProblem problem = make_problem(cfg, cfg.sigma.value_or(0.0));
  out << format_double(sigma_threshold(problem)) << ',' << to_string(classify_regime(problem)) << '\n';
  return kOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
  const SweepTable table =
      sweep(cfg.s_values, cfg.sigma_values, make_angle_solver(cfg.n, AngularProfile::parse(cfg.profile), solver_options(cfg)));
  if (cfg.output)
    write_file(*cfg.output, [&](std::ostream& f) { write_sweep_csv(f, table); });
  else
    write_sweep_csv(out, table);
  return kOk;
}

droplet::GridDomain make_grid(const RunConfig& cfg) {
  return cfg.container == "halfplane" ? droplet::GridDomain::halfplane(cfg.width, cfg.height, cfg.margin, cfg.h)
                                      : droplet::GridDomain::rectangle(cfg.width, cfg.height, cfg.margin, cfg.h);
}

std::optional<double> measured_angle(const droplet::GridDomain& grid, const droplet::DropletState& state) {
  if (grid.kind() != droplet::ContainerKind::halfplane) return std::nullopt;
  const auto m = droplet::measure_contact_angle(grid, state);
  return m.theta ? std::optional(*m.theta * 180.0 / kPi) : std::nullopt;
}

std::optional<double> el_spread(const droplet::GridDomain& grid, const droplet::DropletState& state,
                                const ContactAngleProblem& problem) {
  try {
    return droplet::el_residual(grid, state, problem).spread;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

int run_minimize(const RunConfig& cfg, std::ostream& out) {
  const auto grid = make_grid(cfg);
  const auto problem = make_problem(cfg, *cfg.sigma);
  droplet::AnnealSchedule schedule;
  schedule.initial_temperature = cfg.t0;
  schedule.temperature_factor = cfg.temperature_factor;
  schedule.cooling_factor = cfg.cooling;
  schedule.steps_per_level = cfg.steps;
  schedule.levels = cfg.levels;
  schedule.rng_seed = cfg.seed;
  const auto result = droplet::minimize(grid, cfg.m, problem, schedule);
  if (cfg.output) write_file(*cfg.output, [&](std::ostream& f) { droplet::write_snapshot(f, grid, result.state); });
  if (cfg.trace) write_file(*cfg.trace, [&](std::ostream& f) { droplet::write_trace(f, result.trace); });
  out << format_double(result.energy.total) << ',' << optional_number(measured_angle(grid, result.state)) << ','
      << optional_number(el_spread(grid, result.state, problem)) << '\n';
  return kOk;
}

int run_energy(const RunConfig& cfg, std::ostream& out) {
  std::ifstream in(*cfg.input);
  if (!in) throw IoError("cannot open snapshot '" + *cfg.input + "'");
  std::optional<std::pair<droplet::GridDomain, droplet::DropletState>> snap;
  try {
    snap.emplace(droplet::read_snapshot(in));
  } catch (const DomainError& e) {
    throw IoError("malformed snapshot '" + *cfg.input + "': " + e.what());
  }
  const auto& [grid, state] = *snap;
  const auto e = droplet::capillarity_energy(grid, state, make_problem(cfg, *cfg.sigma));
  out << format_double(e.liquid_gas) << ',' << format_double(e.liquid_solid) << ',' << format_double(e.total)
      << '\n';
  return kOk;
}

int run_validate(std::ostream& out) {
  bool all = true;
  auto report = [&](const char* name, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << ' ' << detail << '\n';
    all = all && pass;
  };

  {
    bool pass = true;
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
      const FractionalKernel k(2, s);
      const auto r = check_bounds(k, {1.0 / (s * (1.0 - s)), 1.0}, 64);
      pass = pass && r.pass;
      worst = std::max(worst, r.worst_ratio);
    }
    report("kernel_bounds", pass, "worst_ratio=" + format_double(worst));
  }
  {
    // The halfplane is its own reflection, so its curvature vanishes.
    const FractionalKernel k(2, 0.5);
    const double flat = wedge_nmc(k, {2, kPi - 1e-9, 1.0});
    const double scale = halfspace_exterior_integral(k, 1.0);
    report("pv_halfspace_zero", std::abs(flat) < 1e-6 * scale, "nmc=" + format_double(flat));
  }
  {
    double worst = 0.0;
    for (double s : {0.1, 0.5, 0.9}) {
      const auto sol = solve_contact_angle(ContactAngleProblem::single(FractionalKernel(2, s), 0.0));
      worst = std::max(worst, std::abs(sol.theta.value_or(0.0) - 0.5 * kPi));
    }
    report("symmetric_wetting", worst < 1e-4, "max_error=" + format_double(worst));
  }
  {
    double worst = 0.0;
    for (double sigma : {-0.6, 0.0, 0.6}) {
      double best = 0.0, best_e = std::numeric_limits<double>::infinity();
      for (int k = 1; k < 200000; ++k) {
        const double theta = kPi * k / 200000.0;
        const double e = classical_cap_energy({1.0, sigma, theta});
        if (e < best_e) best_e = e, best = theta;
      }
      worst = std::max(worst, std::abs(best - classical_young(sigma)));
    }
    report("cap_energy_criticality", worst < 1e-4, "max_error=" + format_double(worst));
  }
  return all ? kOk : kValidationFailed;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app("Nonlocal capillarity: contact angles, sweeps and lattice droplets", "nlcap");
  app.set_help_flag("--help", "Print this help message and exit");
  std::string command;
  std::string config_path;
  app.add_option("command", command, "angle | sweep | regime | threshold | minimize | energy | validate")
      ->required();
  app.add_option("--config", config_path, "key=value file; flags override its entries");
  RawValues flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : kKeys) options[key.name] = app.add_option(std::string("--") + key.name, flags[key.name], key.help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("", e.what());
  }

  RawValues raw;
  if (!config_path.empty()) raw = read_config_file(config_path);
  for (const auto& [key, opt] : options)
    if (opt->count() > 0) raw[key] = flags[key];
  return convert(to_command(command), raw);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::angle: return run_angle(cfg, out);
      case Command::regime: return run_regime(cfg, out);
      case Command::threshold: return run_threshold(cfg, out);
      case Command::sweep: return run_sweep(cfg, out);
      case Command::minimize: return run_minimize(cfg, out);
      case Command::energy: return run_energy(cfg, out);
      case Command::validate: return run_validate(out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    err << "numerical error: " << e.what() << " (residuals " << format_double(e.residual_lo()) << ", "
        << format_double(e.residual_hi()) << ")\n";
    return kNumericalError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (achieved " << format_double(e.achieved_tolerance()) << ")\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& e) {
    out << e.what();
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  }
  return run(cfg, out, err);
}

}  // namespace nlcap::cli
