#include "bardina/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bardina/errors.hpp"
#include "bardina/grid_transform.hpp"
#include "detail/caches.hpp"

namespace bardina {

void SolverParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be positive", "solver.gamma");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be nonnegative", "solver.alpha");
  }
  if (resolution < 4 || resolution > 128 || !is_transform_friendly(resolution)) {
    throw ConfigError("resolution must be even, in [4, 128], with prime factors <= 7", "solver.N");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt must be positive", "solver.dt");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("horizon must be nonnegative", "solver.T");
  }
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("horizon must be an integer multiple of dt", "solver.T");
  }
  if (sample_every < 1) {
    throw ConfigError("sample_every must be >= 1", "solver.sample_every");
  }
  if (!(cfl_max > 0.0)) {
    throw ConfigError("cfl_max must be positive", "solver.cfl_max");
  }
  if (!(padding >= 1.5)) {
    throw ConfigError("padding below 3/2 would alias the quadratic term", "solver.padding");
  }
}

long SolverParams::step_count() const { return std::lround(horizon / dt); }

Json to_json(const SolverParams& p) {
  Json j;
  j["alpha"] = p.alpha;
  j["gamma"] = p.gamma;
  j["N"] = p.resolution;
  j["dt"] = p.dt;
  j["T"] = p.horizon;
  j["sample_every"] = p.sample_every;
  j["cfl_max"] = p.cfl_max;
  j["padding"] = p.padding;
  j["forcing"] = p.forcing_id;
  j["init"] = p.init_id;
  j["seed"] = p.seed;
  if (p.diagnostic_only()) {
    j["note"] = "direct Galerkin Euler - diagnostic only";
  }
  return j;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back(s.t);
  }
  return out;
}

const SpectralField& Trajectory::at_time(double t) const {
  for (const auto& s : samples) {
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
      return s.state;
    }
  }
  std::ostringstream msg;
  msg << "no sample at t = " << t;
  throw std::out_of_range(msg.str());
}

SpectralField rhs(const SpectralField& u, const SpectralField& g, double alpha, double gamma,
                  const AdvectOptions& options) {
  if (u.resolution() != g.resolution()) {
    throw ResolutionMismatch("rhs: state and forcing resolutions differ");
  }
  SpectralField out = leray_project(g);
  out -= advect(u, options);
  helmholtz_filter_in_place(out, alpha);
  out.axpy(-gamma, u);
  return out;
}

Stepper::Stepper(const SolverParams& params, const SpectralField& forcing)
    : params_(params),
      advector_(&detail::cached_advector(params.resolution, AdvectOptions{params.padding, true})),
      decay_full_(std::exp(-params.gamma * params.dt)),
      decay_half_(std::exp(-0.5 * params.gamma * params.dt)) {
  if (forcing.resolution() != params.resolution) {
    throw ResolutionMismatch("forcing resolution does not match the solver");
  }
  steady_ = helmholtz_filter(leray_project(forcing), params.alpha);
  steady_ *= 1.0 / params.gamma;
  const int n = params.resolution;
  k1_ = k2_ = k3_ = k4_ = stage_ = full_ = SpectralField(n);
}

void Stepper::nonlinear(const SpectralField& w, SpectralField& out) {
  full_ = w;
  full_ += steady_;
  advector_->apply(full_, out);
  out *= -1.0;
  helmholtz_filter_in_place(out, params_.alpha);
}

void Stepper::advance(SpectralField& u, double time_after) {
  if (u.resolution() != params_.resolution) {
    throw ResolutionMismatch("state resolution does not match the solver");
  }
  const double dt = params_.dt;
  const double e = decay_full_;
  const double e2 = decay_half_;
  u -= steady_;
  const auto w = u.raw();
  const std::size_t size = w.size();

  nonlinear(u, k1_);
  {
    auto s = stage_.raw();
    auto a = k1_.raw();
    for (std::size_t i = 0; i < size; ++i) s[i] = e2 * (w[i] + 0.5 * dt * a[i]);
  }
  nonlinear(stage_, k2_);
  {
    auto s = stage_.raw();
    auto b = k2_.raw();
    for (std::size_t i = 0; i < size; ++i) s[i] = e2 * w[i] + 0.5 * dt * b[i];
  }
  nonlinear(stage_, k3_);
  {
    auto s = stage_.raw();
    auto c = k3_.raw();
    for (std::size_t i = 0; i < size; ++i) s[i] = e * w[i] + dt * e2 * c[i];
  }
  nonlinear(stage_, k4_);
  {
    auto a = k1_.raw();
    auto b = k2_.raw();
    auto c = k3_.raw();
    auto d = k4_.raw();
    const double sixth = dt / 6.0;
    for (std::size_t i = 0; i < size; ++i) {
      w[i] = e * w[i] + sixth * (e * a[i] + 2.0 * e2 * (b[i] + c[i]) + d[i]);
    }
  }
  u += steady_;
  if (!u.all_finite()) {
    std::ostringstream msg;
    msg << "blow-up suspected: non-finite coefficients at t = " << time_after;
    throw BlowUpError(msg.str(), time_after);
  }
}

void Stepper::check_cfl(const SpectralField& u, double time) const {
  const double spacing = 2.0 * std::numbers::pi / params_.resolution;
  const double speed = std::max(1.0, norm(u, NormKind::linf()));
  const double cfl = params_.dt * speed / spacing;
  if (!(cfl <= params_.cfl_max)) {
    std::ostringstream msg;
    msg << "blow-up suspected: CFL number " << cfl << " exceeds " << params_.cfl_max << " at t = " << time;
    throw BlowUpError(msg.str(), time);
  }
}

SpectralField step(const SpectralField& u, const SpectralField& g, double alpha, double gamma, double dt) {
  SolverParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.resolution = u.resolution();
  p.dt = dt;
  Stepper s(p, g);
  SpectralField out = u;
  s.advance(out, dt);
  return out;
}

Trajectory simulate(const SolverParams& params, const SpectralField& forcing, const SpectralField& u0) {
  params.validate();
  if (u0.resolution() != params.resolution) {
    throw ResolutionMismatch("initial state resolution does not match the solver");
  }
  Stepper stepper(params, forcing);
  Trajectory traj;
  traj.params = params;
  traj.forcing = forcing;
  traj.samples.push_back({0.0, u0});
  const long steps = params.step_count();
  SpectralField u = u0;
  if (steps > 0) {
    stepper.check_cfl(u, 0.0);
  }
  for (long i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) * params.dt;
    stepper.advance(u, t);
    if (i % 100 == 0) {
      stepper.check_cfl(u, t);
    }
    if (i % params.sample_every == 0 || i == steps) {
      traj.samples.push_back({t, u});
    }
  }
  return traj;
}

CertificateReport semigroup_property_check(const SolverParams& params, const SpectralField& forcing,
                                           const SpectralField& u0, double t1, double t2) {
  SolverParams whole = params;
  whole.horizon = t1 + t2;
  whole.sample_every = std::max<int>(1, static_cast<int>(whole.step_count()));
  SolverParams first = params;
  first.horizon = t1;
  first.sample_every = std::max<int>(1, static_cast<int>(first.step_count()));
  SolverParams second = params;
  second.horizon = t2;
  second.sample_every = std::max<int>(1, static_cast<int>(second.step_count()));

  const Trajectory a = simulate(whole, forcing, u0);
  const Trajectory b1 = simulate(first, forcing, u0);
  const Trajectory b2 = simulate(second, forcing, b1.samples.back().state);

  SpectralField diff = a.samples.back().state;
  diff -= b2.samples.back().state;
  const double gap = norm(diff, NormKind::l2());
  const double scale = norm(a.samples.back().state, NormKind::l2());

  CertificateReport r;
  r.name = "semigroup_property";
  r.params = to_json(params);
  r.params["t1"] = t1;
  r.params["t2"] = t2;
  r.tolerance = {{"relative", 1e-10}};
  r.add(t1 + t2, gap, 1e-10 * scale, 0.0, {{"state_norm_L2", scale}});
  r.finalize();
  return r;
}

}  // namespace bardina
