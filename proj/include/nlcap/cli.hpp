#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlcap::cli {

enum class Command { angle, sweep, regime, threshold, minimize, energy, validate };

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
};

/// Bad or missing configuration value; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// `--help` was given; what() holds the usage message.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully validated settings. Config-file keys equal the long flag names.
struct RunConfig {
  Command command = Command::validate;

  int n = 2;
  std::optional<double> s;
  std::optional<double> s1;
  std::optional<double> s2;
  std::string profile = "iso";
  std::string profile2 = "iso";
  std::optional<double> sigma;
  double tol = 1e-6;
  unsigned long long seed = 1;

  std::string container = "halfplane";
  int width = 32;
  int height = 32;
  int margin = 16;
  double h = 1.0;
  int m = 200;

  std::optional<double> t0;
  double temperature_factor = 1.0;
  double cooling = 0.95;
  int steps = 2000;
  int levels = 60;

  std::vector<double> s_values;
  std::vector<double> sigma_values;

  std::optional<std::string> output;
  std::optional<std::string> trace;
  std::optional<std::string> input;
};

/// Parses `args` (without the program name): a command followed by flags.
/// `--config FILE` loads `key=value` lines first; flags then override them.
/// Throws ConfigError, IoError (unreadable config file) or HelpRequested.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes a parsed configuration and returns the exit code. Errors are
/// reported on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with the exit-code mapping applied to every failure.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlcap::cli
