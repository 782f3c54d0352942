#include "bardina/workbench.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "bardina/checkpoint.hpp"
#include "bardina/emit.hpp"
#include "bardina/errors.hpp"
#include "bardina/random_fields.hpp"
#include "bardina/scenario.hpp"

namespace bardina {

namespace {

std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& opts) {
  return opts.out.empty() ? std::filesystem::path(cfg.output.dir) : opts.out;
}

CertifyOptions certify_options(const RunConfig& cfg) { return {cfg.tolerance, cfg.certify.e_alpha}; }

bool selected(const RunConfig& cfg, const std::string& name) {
  const auto& c = cfg.certify.certificates;
  return std::find(c.begin(), c.end(), name) != c.end();
}

int verdict_exit(const std::vector<CertificateReport>& reports, std::ostream& log) {
  int code = exit_ok;
  for (const auto& r : reports) {
    log << to_string(r.verdict) << "  " << r.name << "  margin " << format_double(r.margin()) << "\n";
    for (const auto& w : r.warnings) {
      log << "  warning: " << w << "\n";
    }
    if (r.verdict == Verdict::fail) {
      code = exit_certificate;
    }
  }
  return code;
}

std::string alpha_tag(double alpha) { return "alpha_" + format_double(alpha); }

template <class F>
void parallel_for(std::size_t count, int lanes, F&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1, lanes), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) guarded(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Trajectory run_configured(const RunConfig& cfg, std::ostream& log) {
  if (cfg.solver.diagnostic_only()) {
    log << "note: alpha = 0 runs the Galerkin Euler system; results are diagnostic only\n";
  }
  const int n = cfg.solver.resolution;
  return simulate(cfg.solver, make_forcing(cfg.forcing, n), make_initial(cfg.init, n));
}

CertificateReport single_check(const std::string& name, double lhs, double rhs, double tol, Json params = Json::object()) {
  CertificateReport r;
  r.name = name;
  r.params = std::move(params);
  r.tolerance = {{"absolute", tol}};
  r.add(0.0, lhs, rhs, tol);
  r.finalize();
  return r;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return d.max_abs();
}

SpectralField with_gradient_part(int n, std::uint64_t seed) {
  SpectralField f = random_divfree_field(n, 5.0, 1.0, seed);
  const SpectralField extra = random_divfree_field(n, 5.0, 1.0, seed + 1);
  // add a pure gradient i k psi_k so the projector has something to remove
  for_each_mode(n, [&](int, int, int l, Wavevector k, double) {
    if (k.squared_norm() == 0 || !f.retains(k) || (l == 0 && (k.x < 0 || (k.x == 0 && k.y < 0)))) return;
    const Complex psi = extra.coeff(k)[0];
    f.add_mode(k, {Complex(0, k.x) * psi, Complex(0, k.y) * psi, Complex(0, k.z) * psi});
  });
  return f;
}

}  // namespace

Trajectory thin(const Trajectory& traj, int stride) {
  if (stride <= 1) return traj;
  Trajectory out = traj;
  out.samples.clear();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == traj.samples.size()) {
      out.samples.push_back(traj.samples[i]);
    }
  }
  return out;
}

std::vector<TestFunction> configured_test_functions(const RunConfig& cfg) {
  std::vector<TestFunction> out;
  for (int i = 0; i < cfg.certify.test_functions; ++i) {
    out.push_back(TestFunction::random(cfg.certify.test_seed + static_cast<std::uint64_t>(i), cfg.certify.test_kmax,
                                       cfg.certify.test_modes, cfg.certify.test_amplitude));
  }
  return out;
}

int simulate_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const auto dir = output_dir(cfg, opts);
  const Trajectory traj = run_configured(cfg, log);
  write_text(dir / "run_config.ini", serialize_config(cfg));
  write_text(dir / "energy.csv", energy_csv(traj));
  const int every = cfg.output.checkpoint_every;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const bool last = i + 1 == traj.samples.size();
    if (!last && (every == 0 || i % static_cast<std::size_t>(every) != 0)) continue;
    const auto& s = traj.samples[i];
    const std::string name = last ? "final.bin" : "sample_" + std::to_string(i) + ".bin";
    std::filesystem::create_directories(dir / "checkpoints");
    write_checkpoint(dir / "checkpoints" / name, {s.state, cfg.solver.alpha, cfg.solver.gamma, s.t});
  }
  log << "simulate: " << traj.samples.size() << " samples written to " << dir.string() << "\n";
  return exit_ok;
}

int certify_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const auto dir = output_dir(cfg, opts);
  const Trajectory traj = run_configured(cfg, log);
  const CertifyOptions co = certify_options(cfg);
  std::vector<CertificateReport> reports;
  if (selected(cfg, "dissipative")) reports.push_back(check_dissipative_estimate(traj, co));
  if (selected(cfg, "energy")) reports.push_back(check_energy_inequality(traj, co));
  if (selected(cfg, "semigroup")) {
    const long steps = cfg.solver.step_count();
    const double t1 = static_cast<double>(steps / 3) * cfg.solver.dt;
    reports.push_back(semigroup_property_check(cfg.solver, traj.forcing, traj.initial(), t1, t1));
  }
  if (selected(cfg, "absorbing")) reports.push_back(check_absorbing(traj, co).report);
  if (selected(cfg, "variational")) {
    const Trajectory coarse = thin(traj, cfg.certify.test_stride);
    const auto phis = configured_test_functions(cfg);
    for (std::size_t i = 0; i < phis.size(); ++i) {
      auto r = check_variational_inequality(coarse, phis[i], co);
      r.name += "_" + std::to_string(i);
      reports.push_back(std::move(r));
    }
  }
  if (selected(cfg, "m_properties")) {
    log << "note: m_properties needs an alpha family and runs under 'sweep'\n";
  }
  write_text(dir / "run_config.ini", serialize_config(cfg));
  emit_reports(reports, dir);
  return verdict_exit(reports, log);
}

int sweep_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const auto dir = output_dir(cfg, opts);
  const int n = cfg.solver.resolution;
  SweepShared shared{cfg.solver, make_forcing(cfg.forcing, n), make_initial(cfg.init, n), cfg.sweep.rule};
  const SweepFamily family = alpha_sweep(shared, cfg.sweep.alphas, opts.serial ? 1 : lane_count());

  std::string csv = "alpha,time,energy_L2,energy_Halpha\n";
  Json summary = {{"alphas", family.alphas},
                  {"init_rule", to_string(family.shared.rule)},
                  {"initial_bound", family.initial_bound},
                  {"trajectory_bound", family.trajectory_bound}};
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& m = family.members[i];
    const double a = family.alphas[i];
    for (const auto& s : m.samples) {
      csv += format_double(a) + "," + format_double(s.t) + "," + format_double(std::pow(norm(s.state, NormKind::l2()), 2)) +
             "," + format_double(std::pow(norm(s.state, NormKind::h_alpha(a)), 2)) + "\n";
    }
    write_text(dir / alpha_tag(a) / "energy.csv", energy_csv(m));
    const auto& last = m.samples.back();
    write_checkpoint(dir / alpha_tag(a) / "final.bin", {last.state, a, cfg.solver.gamma, last.t});
  }
  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < family.members.size(); ++i) {
    gaps.push_back(traj_distance(family.members[i], family.members[i + 1]));
  }
  summary["consecutive_distances"] = gaps;
  summary["extrapolated_distance"] = aitken_limit(gaps);
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep.json", summary.dump(2) + "\n");
  write_text(dir / "run_config.ini", serialize_config(cfg));

  std::vector<CertificateReport> reports;
  const CertifyOptions co = certify_options(cfg);
  if (selected(cfg, "absorbing")) reports.push_back(check_absorbing(family, co).report);
  if (selected(cfg, "m_properties")) {
    const auto times = thin(family.finest(), cfg.certify.test_stride).times();
    const auto phis = configured_test_functions(cfg);
    for (std::size_t i = 0; i < phis.size(); ++i) {
      for (auto& r : check_m_properties(family, phis[i], times, {co, cfg.certify.shift})) {
        r.name += "_" + std::to_string(i);
        reports.push_back(std::move(r));
      }
    }
  }
  emit_reports(reports, dir);
  log << "sweep: " << family.members.size() << " members written to " << dir.string() << "\n";
  return verdict_exit(reports, log);
}

int semicontinuity_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const auto dir = output_dir(cfg, opts);
  const auto& sc = cfg.semicontinuity;
  const int n = cfg.solver.resolution;
  const SpectralField g = make_forcing(cfg.forcing, n);
  const SpectralField u0 = make_initial(cfg.init, n);
  const double scale = std::max(norm(u0, NormKind::l2()), 1.0);

  std::vector<double> alphas = sc.alphas;
  alphas.push_back(sc.reference_alpha);
  const std::size_t per = static_cast<std::size_t>(sc.ensemble);
  std::vector<Trajectory> runs(alphas.size() * per);
  parallel_for(runs.size(), opts.serial ? 1 : lane_count(), [&](std::size_t idx) {
    const std::size_t member = idx % per;
    SolverParams p = cfg.solver;
    p.alpha = alphas[idx / per];
    SpectralField start = initial_for_alpha(u0, p.alpha, cfg.sweep.rule);
    if (member > 0) {
      start.axpy(sc.perturbation * scale, random_divfree_field(n, 3.0, 1.0, cfg.init.seed + 1000 + member));
    }
    runs[idx] = simulate(p, g, start);
  });
  std::vector<std::pair<double, std::vector<Trajectory>>> ensembles;
  for (std::size_t a = 0; a < sc.alphas.size(); ++a) {
    ensembles.emplace_back(sc.alphas[a], std::vector<Trajectory>(runs.begin() + a * per, runs.begin() + (a + 1) * per));
  }
  const std::vector<Trajectory> reference(runs.end() - static_cast<std::ptrdiff_t>(per), runs.end());
  SemicontinuityOptions so;
  so.window_samples = sc.window_samples;
  so.window_stride = sc.window_stride;
  so.entry_time = sc.entry_time;
  so.metric.sobolev_index = sc.sobolev_index;
  SemicontinuityTable table;
  try {
    table = semicontinuity_diag(ensembles, reference, so);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("semicontinuity: ") + e.what(), "semicontinuity.window_samples");
  }
  std::string csv = "alpha,gap,windows\n";
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    csv += format_double(r.alpha) + "," + format_double(r.gap) + "," + std::to_string(r.windows) + "\n";
    rows.push_back({{"alpha", r.alpha}, {"gap", r.gap}, {"windows", r.windows}});
    log << "alpha " << format_double(r.alpha) << "  gap " << format_double(r.gap) << "\n";
  }
  Json summary = {{"reference_alpha", sc.reference_alpha},
                  {"reference_windows", table.reference_windows},
                  {"rows", rows},
                  {"nonincreasing", table.nonincreasing}};
  write_text(dir / "semicontinuity.csv", csv);
  write_text(dir / "semicontinuity.json", summary.dump(2) + "\n");
  write_text(dir / "run_config.ini", serialize_config(cfg));
  if (!table.nonincreasing) {
    log << "warning: gaps increase as alpha decreases\n";
  }
  return exit_ok;
}

int dim_bound_command(double forcing_norm, double alpha, double gamma, std::ostream& log) {
  double value = 0.0;
  try {
    value = dimension_bound(forcing_norm, alpha, gamma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "dim-bound");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  log << buf << "\n";
  return exit_ok;
}

int selftest_command(const CommandOptions& opts, std::ostream& log) {
  const std::filesystem::path dir = opts.out.empty() ? std::filesystem::path("bardina_selftest") : opts.out;
  std::vector<CertificateReport> reports;

  {
    const SpectralField f = with_gradient_part(16, 3);
    const SpectralField p = leray_project(f);
    reports.push_back(single_check("leray_idempotence", max_abs_diff(leray_project(p), p), 0.0, 1e-14 * p.max_abs()));
    const SpectralField a = helmholtz_filter(p, 0.1);
    const SpectralField b = leray_project(helmholtz_filter(f, 0.1));
    reports.push_back(single_check("filter_commutes_with_projection", max_abs_diff(a, b), 0.0, 1e-14 * a.max_abs()));
  }
  {
    CertificateReport r;
    r.name = "advection_energy_orthogonality";
    r.tolerance = {{"relative", 1e-10}};
    for (int i = 0; i < 10; ++i) {
      const SpectralField u = random_divfree_field(16, 5.0, 1.0, 100 + static_cast<std::uint64_t>(i));
      const SpectralField b = advect(u);
      const double rel = std::abs(inner(b, u, NormKind::l2())) / (norm(b, NormKind::l2()) * norm(u, NormKind::l2()));
      r.add(i, rel, 0.0, 1e-10);
    }
    r.finalize();
    reports.push_back(r);
  }

  SolverParams small;
  small.resolution = 8;
  small.dt = 0.01;
  small.horizon = 0.1;
  small.alpha = 0.1;
  {
    const Trajectory zero = simulate(small, SpectralField(8), SpectralField(8));
    double worst = 0.0;
    for (const auto& s : zero.samples) worst = std::max(worst, s.state.max_abs());
    reports.push_back(single_check("zero_scenario_stays_zero", worst, 0.0, 0.0));
    auto d = check_dissipative_estimate(zero);
    d.name = "zero_scenario_dissipative";
    reports.push_back(d);
  }
  {
    SolverParams p = small;
    p.resolution = 16;
    p.horizon = 0.5;
    const SpectralField u0 = kolmogorov_field(16, 1, 1.0);
    const Trajectory run = simulate(p, SpectralField(16), u0);
    CertificateReport r;
    r.name = "shear_decay_exact";
    r.tolerance = {{"absolute", 1e-13}};
    for (const auto& s : run.samples) {
      SpectralField expect = u0;
      expect *= std::exp(-p.gamma * s.t);
      r.add(s.t, max_abs_diff(s.state, expect), 0.0, 1e-13);
    }
    r.finalize();
    reports.push_back(r);
  }
  {
    SolverParams p = small;
    p.resolution = 16;
    p.alpha = 0.05;
    p.horizon = 1.0;
    p.sample_every = 5;
    const SpectralField g = kolmogorov_field(16, 1, 1.0);
    const SpectralField u0 = random_divfree_field(16, 3.0, 1.0, 42);
    const Trajectory run = simulate(p, g, u0);
    reports.push_back(check_dissipative_estimate(run));
    reports.push_back(check_energy_inequality(run));
    reports.push_back(semigroup_property_check(p, g, u0, 0.3, 0.4));
    reports.push_back(check_variational_inequality(thin(run, 2), TestFunction::random(7, 2, 3, 0.5)));
  }
  reports.push_back(
      single_check("dimension_bound_unit", std::abs(dimension_bound(1, 1, 1) - 1.0 / (12.0 * std::acos(-1.0))), 0.0, 1e-15));
  {
    const Checkpoint c{random_divfree_field(8, 3.0, 1.0, 9), 0.01, 1.0, 0.5};
    std::stringstream buf;
    write_checkpoint(buf, c);
    const Checkpoint back = read_checkpoint(buf);
    reports.push_back(single_check("checkpoint_round_trip", max_abs_diff(back.state, c.state), 0.0, 0.0));
  }
  {
    const double a = 1.0;
    const auto e = e_alpha_estimate(kolmogorov_field(16, 1, a), 0.0);
    reports.push_back(single_check("e_alpha_shear_bound", e.value, a / 2.0, 1e-6,
                                   {{"converged", e.converged}, {"iterations", e.iterations}}));
  }
  emit_reports(reports, dir, "selftest.csv");
  return verdict_exit(reports, log);
}

int guarded_exit_code(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << " (t = " << e.time() << ")\n";
    return exit_blow_up;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
}

}  // namespace bardina
