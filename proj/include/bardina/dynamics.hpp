#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bardina/report.hpp"
#include "bardina/spectral_field.hpp"
#include "bardina/spectral_ops.hpp"

namespace bardina {

struct SolverParams {
  double alpha = 0.0;
  double gamma = 1.0;
  int resolution = 32;
  double dt = 1e-3;
  double horizon = 10.0;
  int sample_every = 1;
  double cfl_max = 0.5;
  double padding = 1.5;
  std::string forcing_id = "zero";
  std::string init_id = "zero";
  std::uint64_t seed = 0;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  /// Number of steps to reach the horizon (horizon must be a multiple of dt).
  long step_count() const;
  /// alpha = 0 runs are plain Galerkin Euler and are only for diagnostics.
  bool diagnostic_only() const { return alpha == 0.0; }

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

Json to_json(const SolverParams& p);

struct TrajectorySample {
  double t = 0.0;
  SpectralField state;
};

struct Trajectory {
  SolverParams params;
  SpectralField forcing;
  std::vector<TrajectorySample> samples;
  /// True when the t = 0 state is the first sample.
  bool complete = true;

  std::vector<double> times() const;
  /// Sample whose time matches t to 1e-9 (absolute, scaled by max(1, t)); throws otherwise.
  const SpectralField& at_time(double t) const;
  const SpectralField& initial() const { return samples.front().state; }
};

/// d/dt of the filtered velocity: -gamma u + filter(-advect(u) + Pi g).
SpectralField rhs(const SpectralField& u, const SpectralField& g, double alpha, double gamma,
                  const AdvectOptions& options = {});

/// Integrating-factor RK4 for the filtered system. The affine part
/// -gamma u + filter(Pi g) is integrated exactly around its fixed point, so
/// only the quadratic term is subject to the Runge-Kutta error.
class Stepper {
 public:
  Stepper(const SolverParams& params, const SpectralField& forcing);

  /// Advances u by one step of size dt in place; throws BlowUpError on non-finite values.
  void advance(SpectralField& u, double time_after = 0.0);
  /// Throws BlowUpError if dt max(1, |u|_inf) exceeds cfl_max times the grid spacing.
  void check_cfl(const SpectralField& u, double time) const;
  const SpectralField& steady_state() const { return steady_; }

 private:
  void nonlinear(const SpectralField& w, SpectralField& out);

  SolverParams params_;
  SpectralField steady_;
  Advector* advector_;
  SpectralField k1_, k2_, k3_, k4_, stage_, full_;
  double decay_full_;
  double decay_half_;
};

/// One step from u (stateless convenience wrapper).
SpectralField step(const SpectralField& u, const SpectralField& g, double alpha, double gamma, double dt);

/// Integrates from u0 on [0, horizon], keeping every sample_every-th step and the final step.
Trajectory simulate(const SolverParams& params, const SpectralField& forcing, const SpectralField& u0);

/// Compares a run to t1 + t2 against a run to t1 restarted for t2.
CertificateReport semigroup_property_check(const SolverParams& params, const SpectralField& forcing,
                                           const SpectralField& u0, double t1, double t2);

}  // namespace bardina
