#pragma once

#include "rpnv/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rpnv {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool oracle = false;                 // cross-check one point against the RK4 reference
  std::optional<unsigned> threads;     // overrides config.threads without changing its hash
  double oracle_tolerance = 1e-6;
};

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::optional<double> oracle_deviation;
  double wall_time_s = 0.0;
};

/// Executes one experiment and writes CSV files, the canonical config and manifest.json into
/// options.out_dir. Throws ConfigError / PhysicsError / NumericalError.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Maps an exception to the CLI exit code (2 config, 3 physics, 4 numerical, 1 otherwise).
int exit_code_for(const std::exception& e);

}  // namespace rpnv
