#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bardina/certificates.hpp"
#include "bardina/dynamics.hpp"
#include "bardina/limits.hpp"

namespace bardina {

struct ForcingSpec {
  /// zero | kolmogorov | random_divfree
  std::string kind = "zero";
  /// kolmogorov: g = (0, amplitude sin(wavenumber x), 0).
  int wavenumber = 1;
  double amplitude = 1.0;
  /// random_divfree: Euclidean cutoff and seed; amplitude is the L2 norm.
  double kmax = 2.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ForcingSpec&, const ForcingSpec&) = default;
};

struct InitSpec {
  /// zero | shear | taylor_green | random_divfree | from_checkpoint
  std::string kind = "zero";
  double amplitude = 1.0;
  double kmax = 2.0;
  std::uint64_t seed = 0;
  std::string path;

  friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

struct OutputSpec {
  std::string dir = "bardina_out";
  /// Write a checkpoint every this many samples; 0 writes only the final state.
  int checkpoint_every = 0;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct CertifySpec {
  /// Any of dissipative, energy, variational, semigroup, absorbing, m_properties.
  std::vector<std::string> certificates{"dissipative", "energy"};
  int test_functions = 3;
  std::uint64_t test_seed = 1;
  int test_kmax = 2;
  int test_modes = 4;
  double test_amplitude = 0.5;
  /// Sample stride for the variational and M-property checks.
  int test_stride = 1;
  double shift = 0.0;
  EAlphaOptions e_alpha;

  friend bool operator==(const CertifySpec&, const CertifySpec&) = default;
};

struct SweepSpec {
  std::vector<double> alphas{1e-1, 1e-2, 1e-3};
  InitRule rule = InitRule::filtered;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct SemicontinuitySpec {
  std::vector<double> alphas{1e-1, 3e-2};
  double reference_alpha = 1e-2;
  /// Trajectories per alpha: the configured initial datum plus perturbed copies.
  int ensemble = 2;
  double perturbation = 1e-2;
  int window_samples = 10;
  int window_stride = 5;
  double entry_time = -1.0;
  double sobolev_index = -3.0;

  friend bool operator==(const SemicontinuitySpec&, const SemicontinuitySpec&) = default;
};

struct RunConfig {
  SolverParams solver;
  ForcingSpec forcing;
  InitSpec init;
  OutputSpec output;
  CertifySpec certify;
  ToleranceSettings tolerance;
  SweepSpec sweep;
  SemicontinuitySpec semicontinuity;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses INI-style text: [section] headers, key = value lines, '#' or ';' comments.
/// Unknown sections or keys and invalid values throw ConfigError carrying the key and line.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Applies one "section.key=value" override (line reported as 0).
void apply_override(RunConfig& cfg, const std::string& assignment);
/// Checks every cross-field constraint; throws ConfigError.
void validate(const RunConfig& cfg);
/// Writes every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

}  // namespace bardina
