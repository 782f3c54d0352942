#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bardina/dynamics.hpp"
#include "bardina/report.hpp"
#include "bardina/test_function.hpp"

namespace bardina {

/// Per-sample tolerance: absolute + relative (1 + |rhs|) + c_q h^2 t, with the
/// quadrature coefficient c_q estimated from the run itself.
struct ToleranceSettings {
  double absolute = 1e-10;
  double relative = 1e-6;
  /// Multiplier applied to the Richardson estimate of the trapezoid error.
  double quadrature_safety = 2.0;

  friend bool operator==(const ToleranceSettings&, const ToleranceSettings&) = default;
};

enum class EAlphaMethod { lanczos, power };

struct EAlphaOptions {
  /// lanczos: restarted Krylov acceleration of the same iteration; power: plain shifted power iteration.
  EAlphaMethod method = EAlphaMethod::lanczos;
  /// Operator applications allowed per seed.
  int max_iter = 500;
  /// Krylov basis size before a restart.
  int krylov_dim = 40;
  double rel_tol = 1e-8;
  int seeds = 3;
  std::uint64_t seed = 20240611;

  friend bool operator==(const EAlphaOptions&, const EAlphaOptions&) = default;
};

struct EAlphaResult {
  /// Clamped estimate of the largest generalized Rayleigh quotient.
  double value = 0.0;
  /// Best unclamped quotient found.
  double rayleigh = 0.0;
  /// max over the grid of lambda_max(-strain); an upper envelope for the quotient when positive.
  double strain_bound = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// (1 - alpha Lap)(d/dt phi + gamma phi) + Pi (phi.grad) phi - Pi g at time t;
/// the resolution is taken from g.
SpectralField residual_D(const TestFunction& phi, double t, double alpha, double gamma, const SpectralField& g);

/// sup over divergence-free z of -((z.grad) phi, z) / |z|_{H_alpha}^2 in the N-mode space,
/// maximizing the generalized Rayleigh quotient of filter(Pi(-S z)) with S the strain of phi.
EAlphaResult e_alpha_estimate(const TestFunction& phi, double t, double alpha, int resolution,
                              const EAlphaOptions& options = {});
EAlphaResult e_alpha_estimate(const SpectralField& phi, double alpha, const EAlphaOptions& options = {});

struct CertifyOptions {
  ToleranceSettings tolerance;
  EAlphaOptions e_alpha;
};

CertificateReport check_variational_inequality(const Trajectory& traj, const TestFunction& phi,
                                               const CertifyOptions& options = {});
CertificateReport check_dissipative_estimate(const Trajectory& traj, const CertifyOptions& options = {});
CertificateReport check_energy_inequality(const Trajectory& traj, const CertifyOptions& options = {});

/// y_j = y0 exp(-A_j) + int_0^{t_j} exp(-(A_j - A(s))) f(s) ds with A' = rate,
/// all integrals by the composite trapezoid rule on the sample times.
std::vector<double> gronwall_envelope(const std::vector<double>& times, const std::vector<double>& rate,
                                      const std::vector<double>& source, double y0);

struct QuadratureBudget {
  /// c_q in c_q h^2 t.
  double coefficient = 0.0;
  /// Largest sample spacing h.
  double spacing = 0.0;
  double at(double t) const { return coefficient * spacing * spacing * t; }
};

/// Richardson estimate of the trapezoid error of gronwall_envelope: the
/// envelope is recomputed on every other sample and the difference divided by 3.
QuadratureBudget calibrate_quadrature(const std::vector<double>& times, const std::vector<double>& rate,
                                      const std::vector<double>& source, double y0, double safety);

Json to_json(const ToleranceSettings& t, const QuadratureBudget& q);

}  // namespace bardina
