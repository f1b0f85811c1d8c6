#pragma once

// Named experiments over the library, driven by a flat JSON configuration. Every run writes
// its CSV tables and a summary JSON into the output directory, under names carrying the
// hash of the effective configuration.

#include "dkg/estimates/admissibility.hpp"
#include "dkg/io.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkg {

enum class Experiment { Simulate, Picard, Converge, NullCheck, ProbeNullForm, ProbeDual, InequalityScan, ProductCheck, Gronwall };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);  // throws std::invalid_argument
const std::vector<std::string>& experiment_names();

/// Invalid configuration; `line` is 1-based, 0 when no position applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line) : std::runtime_error(format(message, line)), line_(line) {}
  int line() const { return line_; }

 private:
  static std::string format(const std::string& message, int line) {
    return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
  }
  int line_;
};

struct ExperimentConfig {
  std::optional<Experiment> experiment;

  // grid
  Index n = 128;
  double length = 2 * std::numbers::pi;
  Index n_t = 64;
  double t_box = 2 * std::numbers::pi;

  // equation
  double M = 0;
  double m = 1;
  double g = 0;

  // data
  double l = 0;
  double k = 0.25;
  std::uint64_t seed = 1;
  double amplitude = 1;
  double smoothing = 0;

  // time stepping
  Scheme scheme = Scheme::LawsonRK4;
  double dt = 1e-2;
  double final_time = 1;
  Index save_every = 10;
  std::vector<double> dt_levels = {0.04, 0.02, 0.01, 0.005};
  double picard_interval = 0.05;
  Index picard_nodes = 33;
  int picard_iterations = 12;

  // estimates
  double eps = 0.01;
  int trials = 200;
  double decay = 0.5;
  int doublings = 1;
  std::vector<std::string> pairs = {"++", "+-", "-+", "--"};
  long long samples = 1000000;
  double range = 1024;
  double slack = 1.1;

  unsigned threads = 0;
  std::filesystem::path out = ".";
  bool override_admissibility = false;

  /// Echo of every setting, as written to the summary; the config hash is taken over it.
  io::Json to_json() const;
};

/// Parses a flat JSON document. Unknown keys, wrong types and syntax errors raise ConfigError
/// carrying the line of the offending key or character.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every violated constraint for the configured experiment. Exponent constraints of the
/// estimate probes and the product check are waived by override_admissibility.
std::vector<Violation> validate(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = 0;  // 0 success, 2 configuration error, 3 numerical failure
  std::string message;
  std::vector<std::filesystem::path> artifacts;
  io::Json summary;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

RunResult run(const ExperimentConfig& cfg);

}  // namespace dkg
