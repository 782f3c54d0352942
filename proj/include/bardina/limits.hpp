#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bardina/certificates.hpp"
#include "bardina/dynamics.hpp"
#include "bardina/report.hpp"
#include "bardina/test_function.hpp"

namespace bardina {

enum class InitRule { fixed, filtered };

std::string to_string(InitRule r);
InitRule init_rule_from_string(const std::string& s);

/// u0 itself (fixed) or (1 - alpha Lap)^{-1/2} u0 (filtered).
SpectralField initial_for_alpha(const SpectralField& u0, double alpha, InitRule rule);

struct SweepShared {
  /// Solver settings shared by every member; alpha is overwritten per member.
  SolverParams base;
  SpectralField forcing;
  SpectralField initial;
  InitRule rule = InitRule::fixed;
};

struct SweepFamily {
  SweepShared shared;
  /// Strictly decreasing, all positive.
  std::vector<double> alphas;
  std::vector<Trajectory> members;
  /// sup over members of |u0^alpha|_{H_alpha}.
  double initial_bound = 0.0;
  /// sup over members and samples of |u(t)|_{H_alpha}.
  double trajectory_bound = 0.0;

  const Trajectory& finest() const { return members.back(); }
  double finest_alpha() const { return alphas.back(); }
};

/// Number of concurrent lanes: BARDINA_THREADS if set (>= 1), otherwise the hardware concurrency.
int lane_count();

/// Runs simulate once per alpha. lanes <= 1 runs serially; results do not depend on lanes.
/// A member blow-up aborts the family with a BlowUpError naming the alpha.
SweepFamily alpha_sweep(const SweepShared& shared, const std::vector<double>& alphas, int lanes = 1);

struct TrajMetricConfig {
  double sobolev_index = -3.0;
  /// Only samples with window_start <= t <= window_end take part.
  double window_start = 0.0;
  double window_end = std::numeric_limits<double>::infinity();
  /// One weight per participating sample; empty means 1/n each.
  std::vector<double> weights;
};

/// sum_j w_j |u(t_j) - v(t_j)|_{H^s}; the two sample grids must coincide.
double traj_distance(const Trajectory& u, const Trajectory& v, const TrajMetricConfig& cfg = {});

struct MEstimate {
  double value = 0.0;
  std::size_t family = 0;
  double alpha = 0.0;
  std::string label = "upper estimate";
};

/// min over the families of |u_{alpha_min}(t) - phi(t)|^2_{H_{alpha_min}}.
MEstimate m_estimate(const std::vector<const SweepFamily*>& families, const TestFunction& phi, double t);
MEstimate m_estimate(const SweepFamily& family, const TestFunction& phi, double t);

struct MPropertyOptions {
  CertifyOptions certify;
  /// Shift used by property (3); rounded to a whole number of samples.
  double shift = 0.0;
};

/// Property checks (1)-(4) for the M estimate of one family; one report each.
std::vector<CertificateReport> check_m_properties(const SweepFamily& family, const TestFunction& phi,
                                                  const std::vector<double>& times,
                                                  const MPropertyOptions& options = {});

struct AbsorbingResult {
  CertificateReport report;
  /// First sample time after which M stays below 2 |g|^2 / gamma^2 (NaN when never).
  double entry_time = 0.0;
  /// ln(M(0) / G) / (2 gamma), G = |g|^2 / gamma^2; 0 when M(0) <= G.
  double envelope_entry_time = 0.0;
};

AbsorbingResult check_absorbing(const Trajectory& traj, const CertifyOptions& options = {});
AbsorbingResult check_absorbing(const SweepFamily& family, const CertifyOptions& options = {});

/// |g|^2 / (12 pi alpha^{5/2} gamma^4).
double dimension_bound(double forcing_norm, double alpha, double gamma);

struct SemicontinuityOptions {
  /// Samples per window.
  int window_samples = 10;
  /// Offset between window starts, in samples.
  int window_stride = 5;
  /// Windows start at or after this time; negative means the absorbing entry time of each trajectory.
  double entry_time = -1.0;
  TrajMetricConfig metric;
};

struct SemicontinuityRow {
  double alpha = 0.0;
  double gap = 0.0;
  std::size_t windows = 0;
};

struct SemicontinuityTable {
  std::vector<SemicontinuityRow> rows;
  std::size_t reference_windows = 0;
  /// True when the gaps do not increase as alpha decreases.
  bool nonincreasing = true;
};

/// For each ensemble: sup over its post-entry windows of inf over reference windows of traj_distance.
/// Throws std::invalid_argument when a trajectory has too few post-entry samples.
SemicontinuityTable semicontinuity_diag(const std::vector<std::pair<double, std::vector<Trajectory>>>& ensembles,
                                        const std::vector<Trajectory>& reference,
                                        const SemicontinuityOptions& options = {});

struct WeakStrongOptions {
  TrajMetricConfig metric;
  /// Largest allowed fraction of H0 energy outside |k_i| <= K/2 in the finest members.
  double tail_tolerance = 1e-6;
};

/// Distance between the finest members of two families against c (alpha_min1 + alpha_min2),
/// c fitted from consecutive members. Skipped when the spectral tail has not decayed.
CertificateReport weak_strong_check(const SweepFamily& a, const SweepFamily& b,
                                    const WeakStrongOptions& options = {});

/// Fraction of L2 energy in modes with some |k_i| > K/2.
double spectral_tail_fraction(const SpectralField& u);

/// Aitken delta-squared limit of the last three terms; falls back to the last term when degenerate.
double aitken_limit(const std::vector<double>& seq);

}  // namespace bardina
