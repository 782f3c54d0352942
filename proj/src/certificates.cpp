#include "bardina/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bardina/grid_transform.hpp"
#include "bardina/random_fields.hpp"
#include "bardina/spectral_ops.hpp"
#include "detail/caches.hpp"

namespace bardina {

namespace {

struct RayleighWorkspace {
  RayleighWorkspace(int n, int m) {
    for (auto& t : slots) {
      t = std::make_unique<GridTransform>(n, m);
    }
  }
  std::array<std::unique_ptr<GridTransform>, 3> slots;
};

RayleighWorkspace& rayleigh_workspace(int n, int m) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<RayleighWorkspace>> cache;
  auto& slot = cache[{n, m}];
  if (!slot) {
    slot = std::make_unique<RayleighWorkspace>(n, m);
  }
  return *slot;
}

// out = filter(Pi P_N(-S z)), S sampled on the workspace grid.
void apply_strain_operator(const StrainGrid& s, double alpha, const SpectralField& z, SpectralField& out,
                           RayleighWorkspace& ws) {
  const int m = s.grid;
  for (int c = 0; c < 3; ++c) {
    ws.slots[c]->to_grid(z.component(c));
  }
  std::size_t p = 0;
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      double* r0 = ws.slots[0]->row(x, y);
      double* r1 = ws.slots[1]->row(x, y);
      double* r2 = ws.slots[2]->row(x, y);
      for (int q = 0; q < m; ++q, ++p) {
        const double a = r0[q], b = r1[q], c = r2[q];
        const double sxx = s.entries[0][p], syy = s.entries[1][p], szz = s.entries[2][p];
        const double sxy = s.entries[3][p], sxz = s.entries[4][p], syz = s.entries[5][p];
        r0[q] = -(sxx * a + sxy * b + sxz * c);
        r1[q] = -(sxy * a + syy * b + syz * c);
        r2[q] = -(sxz * a + syz * b + szz * c);
      }
    }
  }
  for (int c = 0; c < 3; ++c) {
    ws.slots[c]->from_grid(out.component(c));
  }
  out.symmetrize();
  leray_project_in_place(out);
  helmholtz_filter_in_place(out, alpha);
}

std::vector<double> subsample(const std::vector<double>& v, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; i += 2) {
    out.push_back(v[i]);
  }
  return out;
}

double max_spacing(const std::vector<double>& times) {
  double h = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    h = std::max(h, times[i] - times[i - 1]);
  }
  return h;
}

Json base_params(const Trajectory& traj) {
  Json p = to_json(traj.params);
  p["forcing_norm_L2"] = norm(traj.forcing, NormKind::l2());
  p["samples"] = traj.samples.size();
  p["quadrature"] = "composite trapezoid on the sample grid";
  return p;
}

}  // namespace

SpectralField residual_D(const TestFunction& phi, double t, double alpha, double gamma, const SpectralField& g) {
  const int n = g.resolution();
  const SpectralField value = phi.value(t, n);
  SpectralField out = phi.time_derivative(t, n);
  out.axpy(gamma, value);
  out = helmholtz_sharpen(out, alpha);
  out += advect(value);
  out -= leray_project(g);
  return out;
}

namespace {

// (2 pi)^3 * multiplicity * (1 + alpha |k|^2) per stored mode, for fast H_alpha pairings.
class EnergyWeights {
 public:
  EnergyWeights(int n, double alpha) : stride_(SpectralField(n).modes_per_component()), w_(stride_) {
    const double vol = torus_volume();
    SpectralField shape(n);
    for_each_mode(n, [&](int i, int j, int l, Wavevector k, double mult) {
      w_[shape.index(i, j, l)] = vol * mult * (1.0 + alpha * double(k.squared_norm()));
    });
  }
  double inner(const SpectralField& a, const SpectralField& b) const {
    const auto x = a.raw();
    const auto y = b.raw();
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Complex* p = x.data() + c * stride_;
      const Complex* q = y.data() + c * stride_;
      for (std::size_t i = 0; i < stride_; ++i) {
        sum += w_[i] * (p[i].real() * q[i].real() + p[i].imag() * q[i].imag());
      }
    }
    return sum;
  }
  double norm(const SpectralField& a) const { return std::sqrt(inner(a, a)); }

 private:
  std::size_t stride_;
  std::vector<double> w_;
};

struct RayleighRun {
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

bool settled(double now, double before, double tol, double scale) {
  return std::abs(now - before) <= tol * std::max(std::abs(now), 1e-6 * scale);
}

RayleighRun power_run(const StrainGrid& s, double alpha, double shift, SpectralField z, const EAlphaOptions& o,
                      RayleighWorkspace& ws) {
  const EnergyWeights energy(z.resolution(), alpha);
  SpectralField bz(z.resolution());
  z *= 1.0 / energy.norm(z);
  RayleighRun run;
  double previous = std::numeric_limits<double>::quiet_NaN();
  while (run.iterations < o.max_iter) {
    apply_strain_operator(s, alpha, z, bz, ws);
    ++run.iterations;
    const double rayleigh = energy.inner(bz, z);
    run.value = std::max(run.value, rayleigh);
    if (settled(rayleigh, previous, o.rel_tol, shift)) {
      run.converged = true;
      break;
    }
    previous = rayleigh;
    bz.axpy(shift, z);
    const double size = energy.norm(bz);
    if (size == 0.0) {
      run.converged = true;
      break;
    }
    z = bz;
    z *= 1.0 / size;
  }
  return run;
}

// Restarted Lanczos in the H_alpha inner product (the operator is self-adjoint there).
// Each restart begins from the current top Ritz vector; the reported value is a Ritz
// value, i.e. the Rayleigh quotient of an explicit trial field.
RayleighRun lanczos_run(const StrainGrid& s, double alpha, double shift, SpectralField z, const EAlphaOptions& o,
                        RayleighWorkspace& ws) {
  const EnergyWeights energy(z.resolution(), alpha);
  const int n = z.resolution();
  const int dim = std::max(2, o.krylov_dim);
  RayleighRun run;
  std::vector<SpectralField> basis;
  basis.reserve(dim);
  SpectralField w(n);
  z *= 1.0 / energy.norm(z);
  while (run.iterations < o.max_iter && !run.converged) {
    basis.clear();
    basis.push_back(z);
    std::vector<double> diag;
    std::vector<double> off;
    Eigen::VectorXd ritz;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < dim && run.iterations < o.max_iter; ++j) {
      apply_strain_operator(s, alpha, basis[j], w, ws);
      ++run.iterations;
      const double a = energy.inner(w, basis[j]);
      diag.push_back(a);
      w.axpy(-a, basis[j]);
      if (j > 0) {
        w.axpy(-off[j - 1], basis[j - 1]);
      }
      for (const auto& q : basis) {
        w.axpy(-energy.inner(w, q), q);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
      const Eigen::Map<const Eigen::VectorXd> d(diag.data(), static_cast<Eigen::Index>(diag.size()));
      const Eigen::Map<const Eigen::VectorXd> e(off.data(), static_cast<Eigen::Index>(off.size()));
      eig.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      const Eigen::Index top = eig.eigenvalues().size() - 1;
      const double theta = eig.eigenvalues()[top];
      ritz = eig.eigenvectors().col(top);
      run.value = std::max(run.value, theta);
      const double b = energy.norm(w);
      if (settled(theta, previous, o.rel_tol, shift) || b <= 1e-14 * shift) {
        run.converged = true;
        break;
      }
      previous = theta;
      if (j + 1 == dim) {
        break;
      }
      off.push_back(b);
      w *= 1.0 / b;
      basis.push_back(w);
    }
    SpectralField next(n);
    for (Eigen::Index i = 0; i < ritz.size(); ++i) {
      next.axpy(ritz[i], basis[static_cast<std::size_t>(i)]);
    }
    z = next;
    z *= 1.0 / energy.norm(z);
  }
  return run;
}

int bandwidth(const SpectralField& u) {
  int m = 0;
  const std::size_t stride = u.modes_per_component();
  const auto d = u.raw();
  for_each_mode(u.resolution(), [&](int i, int j, int l, Wavevector k, double) {
    const std::size_t idx = u.index(i, j, l);
    if (d[idx] != Complex(0.0) || d[stride + idx] != Complex(0.0) || d[2 * stride + idx] != Complex(0.0)) {
      m = std::max({m, std::abs(k.x), std::abs(k.y), std::abs(k.z)});
    }
  });
  return m;
}

}  // namespace

EAlphaResult e_alpha_estimate(const SpectralField& phi, double alpha, const EAlphaOptions& options) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("e_alpha_estimate: alpha must be >= 0");
  }
  const int n = phi.resolution();
  // Products of z (|k_i| <= K) with the strain (|k_i| <= bandwidth) are alias-free on this grid.
  const int m = transform_friendly_size(std::max(n, 2 * phi.max_mode() + bandwidth(phi) + 1));
  const StrainGrid s = strain_on_grid(phi, m);
  double shift = 0.0;
  double bound = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < s.entries[0].size(); ++p) {
    const std::array<double, 6> e = {s.entries[0][p], s.entries[1][p], s.entries[2][p],
                                     s.entries[3][p], s.entries[4][p], s.entries[5][p]};
    shift = std::max(shift, symmetric_spectral_radius(e));
    const std::array<double, 6> neg = {-e[0], -e[1], -e[2], -e[3], -e[4], -e[5]};
    bound = std::max(bound, symmetric_max_eigenvalue(neg));
  }
  EAlphaResult result;
  result.strain_bound = bound;
  if (shift == 0.0) {
    return result;
  }
  RayleighWorkspace& ws = rayleigh_workspace(n, m);
  double best = -std::numeric_limits<double>::infinity();
  bool all_converged = true;
  const double all_modes = std::sqrt(3.0) * n;
  for (int seed = 0; seed < options.seeds; ++seed) {
    SpectralField z = random_divfree_field(n, all_modes, 1.0, options.seed + 7919ULL * seed);
    const RayleighRun run = options.method == EAlphaMethod::lanczos ? lanczos_run(s, alpha, shift, z, options, ws)
                                                                    : power_run(s, alpha, shift, z, options, ws);
    result.iterations += run.iterations;
    all_converged = all_converged && run.converged;
    best = std::max(best, run.value);
  }
  result.converged = all_converged;
  result.rayleigh = best;
  result.value = std::clamp(best, -shift, std::max(bound, 0.0) + 1e-6);
  return result;
}

EAlphaResult e_alpha_estimate(const TestFunction& phi, double t, double alpha, int resolution,
                              const EAlphaOptions& options) {
  return e_alpha_estimate(phi.value(t, resolution), alpha, options);
}

std::vector<double> gronwall_envelope(const std::vector<double>& times, const std::vector<double>& rate,
                                      const std::vector<double>& source, double y0) {
  const std::size_t n = times.size();
  if (rate.size() != n || source.size() != n) {
    throw std::invalid_argument("gronwall_envelope: length mismatch");
  }
  std::vector<double> out(n);
  if (n == 0) {
    return out;
  }
  double decay = 1.0;
  double integral = 0.0;
  out[0] = y0;
  for (std::size_t j = 1; j < n; ++j) {
    const double h = times[j] - times[j - 1];
    const double step = std::exp(-0.5 * h * (rate[j - 1] + rate[j]));
    decay *= step;
    integral = step * integral + 0.5 * h * (step * source[j - 1] + source[j]);
    out[j] = y0 * decay + integral;
  }
  return out;
}

QuadratureBudget calibrate_quadrature(const std::vector<double>& times, const std::vector<double>& rate,
                                      const std::vector<double>& source, double y0, double safety) {
  QuadratureBudget q;
  q.spacing = max_spacing(times);
  const std::size_t n = times.size();
  if (n < 3 || q.spacing == 0.0) {
    return q;
  }
  const std::size_t count = (n % 2 == 1) ? n : n - 1;
  const auto fine = gronwall_envelope(times, rate, source, y0);
  const auto coarse =
      gronwall_envelope(subsample(times, count), subsample(rate, count), subsample(source, count), y0);
  double worst = 0.0;
  for (std::size_t m = 1; m < coarse.size(); ++m) {
    const double t = times[2 * m];
    if (t <= 0.0) {
      continue;
    }
    const double err = std::abs(fine[2 * m] - coarse[m]) / 3.0;
    worst = std::max(worst, err / (q.spacing * q.spacing * t));
  }
  q.coefficient = safety * worst;
  return q;
}

Json to_json(const ToleranceSettings& t, const QuadratureBudget& q) {
  return {{"absolute", t.absolute},
          {"relative", t.relative},
          {"quadrature_coefficient", q.coefficient},
          {"sample_spacing", q.spacing},
          {"quadrature_safety", t.quadrature_safety},
          {"form", "absolute + relative*(1+|rhs|) + c_q*h^2*t"}};
}

CertificateReport check_variational_inequality(const Trajectory& traj, const TestFunction& phi,
                                               const CertifyOptions& options) {
  const double alpha = traj.params.alpha;
  const double gamma = traj.params.gamma;
  const int n = traj.forcing.resolution();
  const NormKind energy = NormKind::h_alpha(alpha);
  const std::size_t count = traj.samples.size();

  CertificateReport r;
  r.name = "variational_inequality";
  r.params = base_params(traj);
  r.params["test_function"] = phi.describe();

  std::vector<double> times(count), rate(count), source(count), lhs(count);
  std::vector<EAlphaResult> e(count);
  std::vector<double> pairing(count);
  SpectralField last_phi;
  EAlphaResult last_e;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = traj.samples[i].t;
    times[i] = t;
    const SpectralField value = phi.value(t, n);
    if (i > 0 && value == last_phi) {
      e[i] = last_e;
    } else {
      e[i] = e_alpha_estimate(value, alpha, options.e_alpha);
    }
    last_phi = value;
    last_e = e[i];
    if (!e[i].converged) {
      std::ostringstream w;
      w << "e_alpha unconverged at t = " << t << " after " << options.e_alpha.max_iter << " iterations";
      r.warnings.push_back(w.str());
    }
    SpectralField gap = traj.samples[i].state;
    gap -= value;
    lhs[i] = std::pow(norm(gap, energy), 2);
    pairing[i] = inner(residual_D(phi, t, alpha, gamma, traj.forcing), gap, NormKind::l2());
    rate[i] = 2.0 * (gamma - e[i].value);
    source[i] = -2.0 * pairing[i];
  }
  const auto rhs = gronwall_envelope(times, rate, source, count ? lhs[0] : 0.0);
  const auto quad =
      calibrate_quadrature(times, rate, source, count ? lhs[0] : 0.0, options.tolerance.quadrature_safety);
  r.tolerance = to_json(options.tolerance, quad);
  for (std::size_t i = 0; i < count; ++i) {
    const double tol = options.tolerance.absolute + options.tolerance.relative * (1.0 + std::abs(rhs[i])) +
                       quad.at(times[i]);
    r.add(times[i], lhs[i], rhs[i], tol,
          {{"e_alpha", e[i].value},
           {"e_alpha_rayleigh", e[i].rayleigh},
           {"strain_bound", e[i].strain_bound},
           {"e_alpha_converged", e[i].converged},
           {"residual_pairing", pairing[i]}});
  }
  r.finalize();
  return r;
}

CertificateReport check_dissipative_estimate(const Trajectory& traj, const CertifyOptions& options) {
  const double alpha = traj.params.alpha;
  const double gamma = traj.params.gamma;
  const NormKind energy = NormKind::h_alpha(alpha);
  const double g2 = std::pow(norm(traj.forcing, NormKind::l2()), 2);
  const double floor = g2 / (gamma * gamma);

  CertificateReport r;
  r.name = "dissipative_estimate";
  r.params = base_params(traj);
  r.tolerance = {{"absolute", options.tolerance.absolute},
                 {"relative", options.tolerance.relative},
                 {"form", "absolute + relative*(1+|rhs|)"}};
  if (traj.samples.empty()) {
    r.finalize();
    return r;
  }
  const double e0 = std::pow(norm(traj.samples.front().state, energy), 2);
  bool fast_rate_violated = false;
  for (const auto& s : traj.samples) {
    const double lhs = std::pow(norm(s.state, energy), 2);
    const double rhs = e0 * std::exp(-gamma * s.t) + floor;
    const double fast = e0 * std::exp(-2.0 * gamma * s.t) + floor;
    const double tol = options.tolerance.absolute + options.tolerance.relative * (1.0 + std::abs(rhs));
    if (fast - lhs < -tol) {
      fast_rate_violated = true;
    }
    r.add(s.t, lhs, rhs, tol,
          {{"energy_L2", std::pow(norm(s.state, NormKind::l2()), 2)},
           {"energy_Halpha", lhs},
           {"rhs_rate_2gamma", fast},
           {"slack_rate_2gamma", fast - lhs}});
  }
  if (fast_rate_violated) {
    r.warnings.push_back(
        "the variant with decay exp(-2 gamma t) is violated on some samples; the verdict uses exp(-gamma t)");
  }
  r.finalize();
  return r;
}

CertificateReport check_energy_inequality(const Trajectory& traj, const CertifyOptions& options) {
  const double alpha = traj.params.alpha;
  const double gamma = traj.params.gamma;
  const std::size_t count = traj.samples.size();
  const NormKind energy = NormKind::h_alpha(alpha);

  CertificateReport r;
  r.name = "energy_inequality";
  r.params = base_params(traj);
  std::vector<double> times(count), rate(count, 2.0 * gamma), source(count), lhs(count), lhs0(count);
  const SpectralField g = leray_project(traj.forcing);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = traj.samples[i];
    times[i] = s.t;
    source[i] = 2.0 * inner(g, s.state, NormKind::l2());
    lhs[i] = std::pow(norm(s.state, energy), 2);
    lhs0[i] = std::pow(norm(s.state, NormKind::l2()), 2);
  }
  const double y0 = count ? lhs[0] : 0.0;
  const double y00 = count ? lhs0[0] : 0.0;
  const auto rhs = gronwall_envelope(times, rate, source, y0);
  const auto rhs0 = gronwall_envelope(times, rate, source, y00);
  const auto quad = calibrate_quadrature(times, rate, source, y0, options.tolerance.quadrature_safety);
  r.tolerance = to_json(options.tolerance, quad);
  r.tolerance["verdict_norm"] = "H_alpha";
  bool h0_violated = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double tol = options.tolerance.absolute + options.tolerance.relative * (1.0 + std::abs(rhs[i])) +
                       quad.at(times[i]);
    const double tol0 = options.tolerance.absolute + options.tolerance.relative * (1.0 + std::abs(rhs0[i])) +
                        quad.at(times[i]);
    if (rhs0[i] - lhs0[i] < -tol0) {
      h0_violated = true;
    }
    r.add(times[i], lhs[i], rhs[i], tol, {{"lhs_H0", lhs0[i]}, {"rhs_H0", rhs0[i]}, {"slack_H0", rhs0[i] - lhs0[i]}});
  }
  if (h0_violated && alpha > 0.0) {
    r.warnings.push_back("the H0 variant is violated on some samples; it is not implied by the dynamics for alpha > 0");
  }
  r.finalize();
  return r;
}

}  // namespace bardina
