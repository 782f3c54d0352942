#include "bardina/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bardina/errors.hpp"

namespace bardina {

namespace {

constexpr double kTimeMatch = 1e-9;

bool same_time(double a, double b) { return std::abs(a - b) <= kTimeMatch * std::max(1.0, std::abs(a)); }

double energy(const SpectralField& u, double alpha) { return std::pow(norm(u, NormKind::h_alpha(alpha)), 2); }

double default_tolerance(const ToleranceSettings& t, double rhs) { return t.absolute + t.relative * (1.0 + std::abs(rhs)); }

// Weighted H^s distance between two equally long runs of samples.
double window_distance(const std::vector<TrajectorySample>& a, std::size_t ia, const std::vector<TrajectorySample>& b,
                       std::size_t ib, std::size_t count, double s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    SpectralField d = a[ia + j].state;
    d -= b[ib + j].state;
    sum += sobolev_norm(d, s);
  }
  return sum / static_cast<double>(count);
}

}  // namespace

std::string to_string(InitRule r) { return r == InitRule::fixed ? "fixed" : "filtered"; }

InitRule init_rule_from_string(const std::string& s) {
  if (s == "fixed") return InitRule::fixed;
  if (s == "filtered") return InitRule::filtered;
  throw std::invalid_argument("unknown initial-data rule '" + s + "'");
}

SpectralField initial_for_alpha(const SpectralField& u0, double alpha, InitRule rule) {
  if (rule == InitRule::fixed || alpha == 0.0) {
    return u0;
  }
  SpectralField out = u0;
  const std::size_t stride = out.modes_per_component();
  auto d = out.raw();
  for_each_mode(out.resolution(), [&](int i, int j, int l, Wavevector k, double) {
    const double f = 1.0 / std::sqrt(1.0 + alpha * double(k.squared_norm()));
    const std::size_t idx = out.index(i, j, l);
    for (int c = 0; c < 3; ++c) {
      d[c * stride + idx] *= f;
    }
  });
  return out;
}

int lane_count() {
  if (const char* env = std::getenv("BARDINA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) {
      return v;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepFamily alpha_sweep(const SweepShared& shared, const std::vector<double>& alphas, int lanes) {
  if (alphas.empty()) {
    throw std::invalid_argument("alpha_sweep: empty alpha list");
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) {
      throw std::invalid_argument("alpha_sweep: every alpha must be positive");
    }
    if (i > 0 && !(alphas[i] < alphas[i - 1])) {
      throw std::invalid_argument("alpha_sweep: alphas must be strictly decreasing");
    }
  }
  SweepFamily family;
  family.shared = shared;
  family.alphas = alphas;
  family.members.resize(alphas.size());
  std::vector<std::exception_ptr> errors(alphas.size());

  auto run_member = [&](std::size_t i) {
    try {
      SolverParams p = shared.base;
      p.alpha = alphas[i];
      family.members[i] = simulate(p, shared.forcing, initial_for_alpha(shared.initial, alphas[i], shared.rule));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = std::clamp(lanes, 1, static_cast<int>(alphas.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      run_member(i);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < alphas.size(); i += static_cast<std::size_t>(workers)) {
          run_member(i);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!errors[i]) {
      continue;
    }
    try {
      std::rethrow_exception(errors[i]);
    } catch (const BlowUpError& e) {
      std::ostringstream msg;
      msg << "sweep member alpha = " << alphas[i] << ": " << e.what();
      throw BlowUpError(msg.str(), e.time());
    }
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& m = family.members[i];
    family.initial_bound = std::max(family.initial_bound, norm(m.initial(), NormKind::h_alpha(alphas[i])));
    for (const auto& s : m.samples) {
      family.trajectory_bound = std::max(family.trajectory_bound, norm(s.state, NormKind::h_alpha(alphas[i])));
    }
  }
  return family;
}

double traj_distance(const Trajectory& u, const Trajectory& v, const TrajMetricConfig& cfg) {
  if (cfg.sobolev_index > 0.0) {
    throw std::invalid_argument("traj_distance: Sobolev index must be <= 0");
  }
  if (u.samples.size() != v.samples.size()) {
    throw std::invalid_argument("traj_distance: sample grids differ in length");
  }
  std::vector<std::size_t> used;
  for (std::size_t j = 0; j < u.samples.size(); ++j) {
    if (!same_time(u.samples[j].t, v.samples[j].t)) {
      throw std::invalid_argument("traj_distance: sample grids differ");
    }
    const double t = u.samples[j].t;
    if (t >= cfg.window_start - kTimeMatch && t <= cfg.window_end + kTimeMatch) {
      used.push_back(j);
    }
  }
  if (used.empty()) {
    return 0.0;
  }
  std::vector<double> w = cfg.weights;
  if (w.empty()) {
    w.assign(used.size(), 1.0 / static_cast<double>(used.size()));
  }
  if (w.size() != used.size()) {
    throw std::invalid_argument("traj_distance: one weight per sample in the window is required");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (!(w[j] > 0.0)) {
      throw std::invalid_argument("traj_distance: weights must be positive");
    }
    SpectralField d = u.samples[used[j]].state;
    d -= v.samples[used[j]].state;
    sum += w[j] * sobolev_norm(d, cfg.sobolev_index);
  }
  return sum;
}

MEstimate m_estimate(const std::vector<const SweepFamily*>& families, const TestFunction& phi, double t) {
  if (families.empty()) {
    throw std::invalid_argument("m_estimate: no families");
  }
  MEstimate best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < families.size(); ++f) {
    const SweepFamily& fam = *families[f];
    const SpectralField& u = fam.finest().at_time(t);
    SpectralField d = u;
    d -= phi.value(t, u.resolution());
    const double v = energy(d, fam.finest_alpha());
    if (v < best.value) {
      best.value = v;
      best.family = f;
      best.alpha = fam.finest_alpha();
    }
  }
  return best;
}

MEstimate m_estimate(const SweepFamily& family, const TestFunction& phi, double t) {
  return m_estimate(std::vector<const SweepFamily*>{&family}, phi, t);
}

std::vector<CertificateReport> check_m_properties(const SweepFamily& family, const TestFunction& phi,
                                                  const std::vector<double>& times_in,
                                                  const MPropertyOptions& options) {
  const Trajectory& fine = family.finest();
  const double alpha = family.finest_alpha();
  const double gamma = fine.params.gamma;
  const int n = fine.forcing.resolution();
  const ToleranceSettings& tol = options.certify.tolerance;
  std::vector<double> times = times_in;
  std::sort(times.begin(), times.end());

  Json params = to_json(fine.params);
  params["alphas"] = family.alphas;
  params["init_rule"] = to_string(family.shared.rule);
  params["test_function"] = phi.describe();
  params["estimator"] = "upper estimate: finest recorded member";

  CertificateReport p1, p2, p3, p4;
  p1.name = "m_property_1_lower_bound";
  p2.name = "m_property_2_polarization";
  p3.name = "m_property_3_shift";
  p4.name = "m_property_4_variational";
  for (auto* r : {&p1, &p2, &p3, &p4}) {
    r->params = params;
    r->tolerance = {{"absolute", tol.absolute}, {"relative", tol.relative}};
  }
  p2.tolerance["alpha_budget"] = "alpha_min (|grad phi|^2 + 2 |grad u| |grad phi|)";

  std::vector<double> mhat(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const SpectralField& u = fine.at_time(t);
    const SpectralField f = phi.value(t, n);
    SpectralField d = u;
    d -= f;
    mhat[i] = energy(d, alpha);
    const double l2 = energy(d, 0.0);
    p1.add(t, l2, mhat[i], default_tolerance(tol, mhat[i]));

    const double m0 = energy(u, alpha);
    const double predicted = m0 + energy(f, 0.0) - 2.0 * inner(u, f, NormKind::l2());
    const double gphi = gradient_energy(f);
    const double budget = alpha * (gphi + 2.0 * std::sqrt(gradient_energy(u) * gphi));
    p2.add(t, std::abs(mhat[i] - predicted), budget, default_tolerance(tol, mhat[i]),
           {{"M_phi", mhat[i]}, {"M_zero", m0}, {"polarized", predicted}});
  }

  // (3): restart the finest member from its state at time h.
  double h = 0.0;
  for (const auto& s : fine.samples) {
    if (std::abs(s.t - options.shift) < std::abs(h - options.shift)) {
      h = s.t;
    }
  }
  p3.params["shift"] = h;
  if (h == 0.0) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      p3.add(times[i], mhat[i], mhat[i], default_tolerance(tol, mhat[i]), {{"shift", 0.0}});
    }
  } else {
    SolverParams restart = fine.params;
    restart.horizon = fine.params.horizon - h;
    const Trajectory moved = simulate(restart, fine.forcing, fine.at_time(h));
    const TestFunction moved_phi = phi.shifted(h);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      if (t + h > fine.params.horizon + kTimeMatch) {
        continue;
      }
      SpectralField d = moved.at_time(t);
      d -= moved_phi.value(t, n);
      const double lhs = energy(d, alpha);
      SpectralField e = fine.at_time(t + h);
      e -= phi.value(t + h, n);
      const double rhs = energy(e, alpha);
      p3.add(t, lhs, rhs, default_tolerance(tol, rhs), {{"shift", h}});
    }
  }

  // (4): limit inequality with e_0, D_0 on the `times` grid; the finite-alpha version
  // (which the recorded member satisfies) supplies the O(alpha) budget.
  const std::size_t m = times.size();
  std::vector<double> rate0(m), src0(m), rate_a(m), src_a(m);
  bool unconverged = false;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = times[i];
    const SpectralField& u = fine.at_time(t);
    const SpectralField f = phi.value(t, n);
    SpectralField d = u;
    d -= f;
    const EAlphaResult e0 = e_alpha_estimate(f, 0.0, options.certify.e_alpha);
    const EAlphaResult ea = e_alpha_estimate(f, alpha, options.certify.e_alpha);
    unconverged = unconverged || !e0.converged || !ea.converged;
    rate0[i] = 2.0 * (gamma - e0.value);
    rate_a[i] = 2.0 * (gamma - ea.value);
    src0[i] = -2.0 * inner(residual_D(phi, t, 0.0, gamma, fine.forcing), d, NormKind::l2());
    src_a[i] = -2.0 * inner(residual_D(phi, t, alpha, gamma, fine.forcing), d, NormKind::l2());
  }
  if (unconverged) {
    p4.warnings.push_back("e_alpha estimate unconverged at some samples");
  }
  double worst_cq = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    auto slice = [&](const std::vector<double>& v) { return std::vector<double>(v.begin() + i, v.end()); };
    const auto ts = slice(times);
    const auto env0 = gronwall_envelope(ts, slice(rate0), slice(src0), mhat[i]);
    const auto env_a = gronwall_envelope(ts, slice(rate_a), slice(src_a), mhat[i]);
    const auto q = calibrate_quadrature(ts, slice(rate_a), slice(src_a), mhat[i], tol.quadrature_safety);
    worst_cq = std::max(worst_cq, q.coefficient);
    for (std::size_t j = 1; j < ts.size(); ++j) {
      const double kappa = ts[j] - ts[0];
      const double correction = std::max(0.0, env_a[j] - env0[j]);
      const double budget = default_tolerance(tol, env0[j]) + q.at(kappa) + correction;
      p4.add(ts[j], mhat[i + j], env0[j], budget,
             {{"t_start", ts[0]}, {"rhs_alpha", env_a[j]}, {"alpha_correction", correction}});
    }
  }
  p4.tolerance["quadrature_coefficient_max"] = worst_cq;
  p4.tolerance["form"] = "absolute + relative*(1+|rhs|) + c_q*h^2*kappa + max(0, rhs_alpha - rhs_0)";

  for (auto* r : {&p1, &p2, &p3, &p4}) {
    r->finalize();
  }
  return {p1, p2, p3, p4};
}

AbsorbingResult check_absorbing(const Trajectory& traj, const CertifyOptions& options) {
  const double alpha = traj.params.alpha;
  const double gamma = traj.params.gamma;
  const double big_g = std::pow(norm(traj.forcing, NormKind::l2()) / gamma, 2);
  const std::size_t count = traj.samples.size();
  const ToleranceSettings& tol = options.tolerance;

  AbsorbingResult out;
  CertificateReport& r = out.report;
  r.name = "absorbing_set";
  r.params = to_json(traj.params);
  r.params["G"] = big_g;
  r.params["estimator"] = "upper estimate: finest recorded member";
  r.tolerance = {{"absolute", tol.absolute}, {"relative", tol.relative}};

  std::vector<double> mhat(count);
  for (std::size_t i = 0; i < count; ++i) {
    mhat[i] = energy(traj.samples[i].state, alpha);
  }
  bool fast_violated = false;
  for (std::size_t j = 0; j < count; ++j) {
    const double tj = traj.samples[j].t;
    double bound = std::numeric_limits<double>::infinity();
    double fast = std::numeric_limits<double>::infinity();
    double start = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      const double kappa = tj - traj.samples[i].t;
      const double b = mhat[i] * std::exp(-gamma * kappa) + big_g;
      if (b < bound) {
        bound = b;
        start = traj.samples[i].t;
      }
      fast = std::min(fast, mhat[i] * std::exp(-2.0 * gamma * kappa) + big_g);
    }
    const double t_tol = default_tolerance(tol, bound);
    if (fast - mhat[j] < -t_tol) {
      fast_violated = true;
    }
    r.add(tj, mhat[j], bound, t_tol,
          {{"tightest_start", start}, {"rhs_rate_2gamma", fast}, {"inside_absorbing_ball", mhat[j] <= 2.0 * big_g}});
  }
  if (fast_violated) {
    r.warnings.push_back(
        "the exp(-2 gamma kappa) form of the Gronwall step is violated on some pairs; the verdict uses exp(-gamma kappa)");
  }

  out.entry_time = std::numeric_limits<double>::quiet_NaN();
  if (big_g == 0.0) {
    out.entry_time = count ? traj.samples.front().t : 0.0;
    r.warnings.push_back("g = 0: the absorbing ball degenerates to {0}; entry time set to the first sample");
  } else {
    for (std::size_t i = count; i-- > 0;) {
      if (mhat[i] > 2.0 * big_g * (1.0 + tol.relative) + tol.absolute) {
        break;
      }
      out.entry_time = traj.samples[i].t;
    }
    if (std::isnan(out.entry_time)) {
      r.warnings.push_back("trajectory does not settle inside the absorbing ball within the horizon");
    }
  }
  const double m0 = count ? mhat.front() : 0.0;
  out.envelope_entry_time = (big_g > 0.0 && m0 > big_g) ? std::log(m0 / big_g) / (2.0 * gamma) : 0.0;
  r.params["entry_time"] = std::isnan(out.entry_time) ? Json(nullptr) : Json(out.entry_time);
  r.params["envelope_entry_time"] = out.envelope_entry_time;
  r.finalize();
  return out;
}

AbsorbingResult check_absorbing(const SweepFamily& family, const CertifyOptions& options) {
  AbsorbingResult r = check_absorbing(family.finest(), options);
  r.report.params["alphas"] = family.alphas;
  return r;
}

double dimension_bound(double forcing_norm, double alpha, double gamma) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("dimension bound requires alpha > 0 (it diverges as alpha -> 0)");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("dimension bound requires gamma > 0");
  }
  if (!(forcing_norm >= 0.0)) {
    throw std::invalid_argument("forcing norm must be >= 0");
  }
  return forcing_norm * forcing_norm / (12.0 * std::numbers::pi * std::pow(alpha, 2.5) * std::pow(gamma, 4));
}

SemicontinuityTable semicontinuity_diag(const std::vector<std::pair<double, std::vector<Trajectory>>>& ensembles,
                                        const std::vector<Trajectory>& reference,
                                        const SemicontinuityOptions& options) {
  if (options.window_samples < 1 || options.window_stride < 1) {
    throw std::invalid_argument("semicontinuity: window size and stride must be >= 1");
  }
  const std::size_t len = static_cast<std::size_t>(options.window_samples);
  struct Window {
    const Trajectory* traj;
    std::size_t start;
  };
  auto windows_of = [&](const std::vector<Trajectory>& trajs) {
    std::vector<Window> out;
    for (const auto& tr : trajs) {
      double entry = options.entry_time;
      if (entry < 0.0) {
        entry = check_absorbing(tr).entry_time;
        if (std::isnan(entry)) {
          throw std::invalid_argument("semicontinuity: trajectory never enters the absorbing ball");
        }
      }
      std::size_t first = 0;
      while (first < tr.samples.size() && tr.samples[first].t < entry - kTimeMatch) {
        ++first;
      }
      if (tr.samples.size() < first + len) {
        throw std::invalid_argument("semicontinuity: insufficient post-absorbing samples");
      }
      for (std::size_t s = first; s + len <= tr.samples.size(); s += static_cast<std::size_t>(options.window_stride)) {
        out.push_back({&tr, s});
      }
    }
    return out;
  };
  const auto ref = windows_of(reference);
  SemicontinuityTable table;
  table.reference_windows = ref.size();
  for (const auto& [alpha, trajs] : ensembles) {
    const auto mine = windows_of(trajs);
    double gap = 0.0;
    for (const auto& w : mine) {
      double closest = std::numeric_limits<double>::infinity();
      for (const auto& q : ref) {
        closest = std::min(closest, window_distance(w.traj->samples, w.start, q.traj->samples, q.start, len,
                                                    options.metric.sobolev_index));
        if (closest == 0.0) {
          break;
        }
      }
      gap = std::max(gap, closest);
    }
    table.rows.push_back({alpha, gap, mine.size()});
  }
  auto sorted = table.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.alpha > b.alpha; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].gap > sorted[i - 1].gap + 1e-12) {
      table.nonincreasing = false;
    }
  }
  return table;
}

double spectral_tail_fraction(const SpectralField& u) {
  const int cut = u.max_mode() / 2;
  const std::size_t stride = u.modes_per_component();
  const auto d = u.raw();
  double total = 0.0;
  double tail = 0.0;
  for_each_mode(u.resolution(), [&](int i, int j, int l, Wavevector k, double mult) {
    const std::size_t idx = u.index(i, j, l);
    const double e = mult * (std::norm(d[idx]) + std::norm(d[stride + idx]) + std::norm(d[2 * stride + idx]));
    total += e;
    if (std::abs(k.x) > cut || std::abs(k.y) > cut || std::abs(k.z) > cut) {
      tail += e;
    }
  });
  return total > 0.0 ? tail / total : 0.0;
}

CertificateReport weak_strong_check(const SweepFamily& a, const SweepFamily& b, const WeakStrongOptions& options) {
  CertificateReport r;
  r.name = "weak_strong_uniqueness";
  r.params = to_json(a.finest().params);
  r.params["alphas_a"] = a.alphas;
  r.params["alphas_b"] = b.alphas;
  r.tolerance = {{"absolute", 1e-12}, {"tail_tolerance", options.tail_tolerance}};

  double tail = 0.0;
  for (const SweepFamily* f : {&a, &b}) {
    for (const auto& s : f->finest().samples) {
      tail = std::max(tail, spectral_tail_fraction(s.state));
    }
  }
  r.params["tail_fraction"] = tail;
  if (tail > options.tail_tolerance) {
    r.warnings.push_back("limit not demonstrably regular: spectral tail has not decayed; check skipped");
    r.verdict = Verdict::skipped;
    return r;
  }
  double c = 0.0;
  Json fits = Json::array();
  for (const SweepFamily* f : {&a, &b}) {
    for (std::size_t i = 0; i + 1 < f->members.size(); ++i) {
      const double d = traj_distance(f->members[i], f->members[i + 1], options.metric);
      const double ci = d / (f->alphas[i] + f->alphas[i + 1]);
      fits.push_back({{"alpha_1", f->alphas[i]}, {"alpha_2", f->alphas[i + 1]}, {"distance", d}, {"c", ci}});
      c = std::max(c, ci);
    }
  }
  r.params["fits"] = fits;
  r.params["c"] = c;
  if (fits.empty()) {
    r.warnings.push_back("no consecutive members to fit c; check skipped");
    r.verdict = Verdict::skipped;
    return r;
  }
  const double d12 = traj_distance(a.finest(), b.finest(), options.metric);
  const double scale = a.finest_alpha() + b.finest_alpha();
  r.add(a.finest().samples.back().t, d12, c * scale, 1e-12, {{"alpha_sum", scale}});
  r.finalize();
  return r;
}

double aitken_limit(const std::vector<double>& seq) {
  if (seq.empty()) {
    return 0.0;
  }
  if (seq.size() < 3) {
    return seq.back();
  }
  const double x0 = seq[seq.size() - 3];
  const double x1 = seq[seq.size() - 2];
  const double x2 = seq[seq.size() - 1];
  const double denom = x2 - 2.0 * x1 + x0;
  if (std::abs(denom) <= 1e-14 * std::max({std::abs(x0), std::abs(x1), std::abs(x2)})) {
    return x2;
  }
  return x2 - (x2 - x1) * (x2 - x1) / denom;
}

}  // namespace bardina
