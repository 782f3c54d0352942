#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bardina/config.hpp"
#include "bardina/report.hpp"

namespace bardina {

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_config = 2, exit_blow_up = 3, exit_certificate = 4 };

struct CommandOptions {
  /// Output directory; empty means output.dir from the config.
  std::filesystem::path out;
  /// Single lane, bit-reproducible.
  bool serial = false;
};

/// Keeps every stride-th sample and the last one.
Trajectory thin(const Trajectory& traj, int stride);

/// The configured random test functions, seeds test_seed, test_seed + 1, ...
std::vector<TestFunction> configured_test_functions(const RunConfig& cfg);

/// The commands below throw; run_command maps exceptions to exit codes and prints diagnostics to err.
int simulate_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int certify_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int sweep_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int semicontinuity_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
/// Prints the bound with 6 significant figures.
int dim_bound_command(double forcing_norm, double alpha, double gamma, std::ostream& log);
/// Built-in example suite; one JSON report per check.
int selftest_command(const CommandOptions& opts, std::ostream& log);

/// Runs fn and maps ConfigError -> 2, BlowUpError -> 3, other exceptions -> 1.
template <class F>
int run_guarded(F&& fn, std::ostream& err);

int guarded_exit_code(std::ostream& err);

template <class F>
int run_guarded(F&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (...) {
    return guarded_exit_code(err);
  }
}

}  // namespace bardina
