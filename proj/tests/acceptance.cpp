// Acceptance suite: `acceptance <1-8|all>` prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "bardina/certificates.hpp"
#include "bardina/dynamics.hpp"
#include "bardina/limits.hpp"
#include "bardina/random_fields.hpp"
#include "bardina/scenario.hpp"
#include "oracles/convolution.hpp"
#include "oracles/fields.hpp"

using namespace bardina;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, const char* f = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Arbitrary (not divergence-free) real field with |k_i| <= kmax.
SpectralField random_general(int n, int kmax, std::uint64_t seed) {
  SpectralField u(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b)
      for (int c = 0; c <= kmax; ++c) {
        if (c == 0 && (a < 0 || (a == 0 && b <= 0))) continue;
        u.set_mode({a, b, c}, {Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng)),
                               Complex(gauss(rng), gauss(rng))});
      }
  return u;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return d.max_abs();
}

SolverParams desk(double alpha, double horizon, int sample_every) {
  SolverParams p;
  p.alpha = alpha;
  p.gamma = 1.0;
  p.resolution = 32;
  p.dt = 1e-3;
  p.horizon = horizon;
  p.sample_every = sample_every;
  return p;
}

// |g|_{L2} = 1 Kolmogorov forcing at wavenumber 1.
SpectralField unit_kolmogorov(int n) {
  SpectralField g = kolmogorov_field(n, 1, 1.0);
  g *= 1.0 / norm(g, NormKind::l2());
  return g;
}

Outcome criterion1() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CertifyOptions opts;
  opts.tolerance.absolute = 0.0;
  opts.tolerance.relative = 1e-6;
  int passed = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const double alpha = std::pow(10.0, -3.0 + 2.0 * unit(rng));
    const double kmax_g = 1.0 + 2.0 * unit(rng);
    const double amp0 = 0.5 + 2.5 * unit(rng);
    const auto seed = static_cast<std::uint64_t>(1000 + i);
    const SpectralField g = random_divfree_field(32, kmax_g, 1.0, seed);
    const SpectralField u0 = random_divfree_field(32, 4.0, amp0, seed + 500);
    const Trajectory traj = simulate(desk(alpha, 10.0, 100), g, u0);
    const auto r = check_dissipative_estimate(traj, opts);
    for (const auto& s : r.samples) worst = std::min(worst, s.slack / (1.0 + std::abs(s.rhs)));
    passed += r.passed() ? 1 : 0;
    std::cerr << "  scenario " << i << " alpha " << fmt(alpha) << " " << to_string(r.verdict) << "\n";
  }
  return {passed == 20, std::to_string(passed) + "/20 scenarios, min slack/(1+rhs) " + fmt(worst)};
}

Outcome criterion2() {
  const SolverParams p = desk(0.01, 2.0, 200);
  const SpectralField u0 = taylor_green_field(32, 1.0);
  const Trajectory tg = simulate(p, SpectralField(32), u0);
  int passed = 0;
  for (int i = 0; i < 10; ++i) {
    const auto phi = TestFunction::random(100 + static_cast<std::uint64_t>(i), 2, 4, 1.0);
    const auto r = check_variational_inequality(tg, phi);
    passed += r.passed() ? 1 : 0;
    std::cerr << "  phi " << i << " " << to_string(r.verdict) << " margin " << fmt(r.margin()) << "\n";
  }
  auto relative_slack = [](const CertificateReport& r) {
    double worst = 0.0;
    for (const auto& s : r.samples) worst = std::max(worst, std::abs(s.slack) / (1.0 + std::abs(s.rhs)));
    return worst;
  };
  const auto zero = check_variational_inequality(tg, TestFunction{});
  const double zero_slack = relative_slack(zero);

  const SpectralField shear = kolmogorov_field(32, 1, 1.0);
  const Trajectory decay = simulate(p, SpectralField(32), shear);
  const auto self = check_variational_inequality(decay, TestFunction::from_field(shear, ExponentialLaw{-p.gamma}));
  const double self_slack = relative_slack(self);
  const bool ok = passed == 10 && zero.passed() && self.passed() && zero_slack <= 1e-6 && self_slack <= 1e-6;
  return {ok, std::to_string(passed) + "/10 test functions; phi=0 |slack|/(1+rhs) " + fmt(zero_slack) +
                  "; self-test " + fmt(self_slack)};
}

Outcome criterion3() {
  double leray = 0.0, commute = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SpectralField f = random_general(32, 15, 10 + static_cast<std::uint64_t>(i));
    const SpectralField p = leray_project(f);
    leray = std::max(leray, max_abs_diff(leray_project(p), p) / p.max_abs());
    const SpectralField a = helmholtz_filter(leray_project(f), 0.05);
    const SpectralField b = leray_project(helmholtz_filter(f, 0.05));
    commute = std::max(commute, max_abs_diff(a, b) / a.max_abs());
  }
  double conv = 0.0;
  for (int i = 0; i < 3; ++i) {
    const SpectralField u = oracle::random_divfree(8, 3, 40 + static_cast<std::uint64_t>(i));
    const SpectralField want = oracle::brute_force_advection(u);
    conv = std::max(conv, max_abs_diff(advect(u), want) / want.max_abs());
  }
  double ortho = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SpectralField u = random_divfree_field(16, 7.0, 1.0, 300 + static_cast<std::uint64_t>(i));
    const SpectralField b = advect(u);
    ortho = std::max(ortho, std::abs(inner(b, u, NormKind::l2())) / (norm(b, NormKind::l2()) * norm(u, NormKind::l2())));
  }
  const bool ok = leray <= 1e-14 && commute <= 1e-14 && conv <= 1e-12 && ortho <= 1e-10;
  return {ok, "Leray idempotence " + fmt(leray) + ", filter commutation " + fmt(commute) + ", advect vs brute force " +
                  fmt(conv) + ", energy orthogonality " + fmt(ortho)};
}

Outcome criterion4() {
  SolverParams p;
  p.alpha = 0.01;
  p.resolution = 16;
  p.horizon = 1.0;
  const SpectralField u0 = taylor_green_field(16, 2.0);
  const SpectralField g = unit_kolmogorov(16);
  std::vector<SpectralField> finals;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    p.dt = dt;
    p.sample_every = 1000000;
    finals.push_back(simulate(p, g, u0).samples.back().state);
  }
  SpectralField d1 = finals[0];
  d1 -= finals[1];
  SpectralField d2 = finals[1];
  d2 -= finals[2];
  const double e1 = norm(d1, NormKind::l2());
  const double e2 = norm(d2, NormKind::l2());
  const double order = std::log2(e1 / e2);
  return {std::abs(order - 4.0) <= 0.3,
          "observed order " + fmt(order, "%.3f") + " (differences " + fmt(e1) + ", " + fmt(e2) + ")"};
}

Outcome criterion5() {
  const double v = dimension_bound(1.0, 1.0, 1.0);
  const std::string printed = fmt(v, "%.6g");
  const std::string expected = fmt(1.0 / (12.0 * std::acos(-1.0)), "%.6g");
  const double base = dimension_bound(0.8, 0.2, 1.1);
  const double r_g = dimension_bound(1.6, 0.2, 1.1) / base;
  const double r_a = dimension_bound(0.8, 0.05, 1.1) / base;
  const bool ok = printed == expected && std::abs(r_g - 4.0) <= 4 * 4e-16 && std::abs(r_a - 32.0) <= 32 * 4e-16;
  return {ok, "dim-bound(1,1,1) = " + printed + ", |g| doubling x" + fmt(r_g, "%.15g") + ", alpha/4 x" + fmt(r_a, "%.15g")};
}

SweepShared tg_shared(double horizon, int sample_every, const SpectralField& forcing) {
  SweepShared s;
  s.base = desk(0.0, horizon, sample_every);
  s.forcing = forcing;
  s.initial = taylor_green_field(32, 1.0);
  s.rule = InitRule::filtered;
  return s;
}

Outcome criterion6() {
  const auto family = alpha_sweep(tg_shared(2.0, 100, SpectralField(32)), {1e-1, 1e-2, 1e-3, 1e-4}, lane_count());
  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < family.members.size(); ++i) {
    gaps.push_back(traj_distance(family.members[i], family.members[i + 1]));
  }
  const bool monotone = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  const double limit = aitken_limit(gaps);
  const bool ok = monotone && std::abs(limit) < 0.1 * gaps[0];
  return {ok, "gaps " + fmt(gaps[0]) + ", " + fmt(gaps[1]) + ", " + fmt(gaps[2]) + "; extrapolated limit " + fmt(limit) +
                  " (" + fmt(100 * std::abs(limit) / gaps[0]) + "% of first gap)"};
}

Outcome criterion7() {
  const SpectralField g = unit_kolmogorov(32);
  const auto family = alpha_sweep(tg_shared(1.0, 100, g), {1e-1, 1e-2, 1e-3}, lane_count());
  MPropertyOptions mo;
  mo.shift = 0.2;
  bool props = true;
  std::string worst;
  for (int i = 0; i < 2; ++i) {
    const auto phi = TestFunction::random(700 + static_cast<std::uint64_t>(i), 2, 4, 1.0);
    for (const auto& r : check_m_properties(family, phi, family.finest().times(), mo)) {
      props = props && r.passed();
      std::cerr << "  " << r.name << " phi " << i << " " << to_string(r.verdict) << " margin " << fmt(r.margin()) << "\n";
      if (!r.passed()) worst += " " + r.name;
    }
  }
  const auto fam_abs = check_absorbing(family);

  // 100x-inflated datum: |u0|^2_{H_alpha} = 100 |g|^2 / gamma^2.
  const double alpha = 0.01;
  SpectralField u0 = taylor_green_field(32, 1.0);
  u0 *= std::sqrt(100.0) / norm(u0, NormKind::h_alpha(alpha));
  const Trajectory big = simulate(desk(alpha, 5.0, 50), g, u0);
  const auto ab = check_absorbing(big);
  const double rel = std::abs(ab.entry_time - ab.envelope_entry_time) / ab.envelope_entry_time;
  const bool ok = props && fam_abs.report.passed() && ab.report.passed() && std::isfinite(ab.entry_time) && rel <= 0.2;
  return {ok, std::string("M-properties ") + (props ? "pass" : "FAIL:" + worst) + "; absorbing " +
                  to_string(ab.report.verdict) + "; T_entry " + fmt(ab.entry_time) + " vs envelope " +
                  fmt(ab.envelope_entry_time) + " (" + fmt(100 * rel) + "% off)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion8() {
  const auto root = std::filesystem::temp_directory_path() / "bardina_acceptance_determinism";
  std::filesystem::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string(BARDINA_CLI) + " selftest --serial --out " + (root / run).string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "selftest run failed"};
  }
  std::size_t files = 0, same = 0;
  for (const auto& e : std::filesystem::directory_iterator(root / "a")) {
    ++files;
    same += slurp(e.path()) == slurp(root / "b" / e.path().filename()) ? 1 : 0;
  }
  const bool count_match = std::distance(std::filesystem::directory_iterator(root / "b"), {}) ==
                           static_cast<std::ptrdiff_t>(files);
  return {files > 0 && same == files && count_match, std::to_string(same) + "/" + std::to_string(files) +
                                                         " report files byte-identical"};
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "dissipative estimate, 20 random scenarios", 300, criterion1},
    {2, "variational-inequality certificate", 600, criterion2},
    {3, "spectral exactness", 60, criterion3},
    {4, "integrator order", 120, criterion4},
    {5, "dimension-bound formula", 1, criterion5},
    {6, "alpha -> 0 Cauchy behaviour", 900, criterion6},
    {7, "M-functional properties and absorbing set", 600, criterion7},
    {8, "serial determinism", 600, criterion8},
};

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string timing = "runtime " + fmt(secs, "%.1f") + " s (target " + fmt(c.budget_seconds, "%.0f") +
                             " s" + (secs > c.budget_seconds ? ", exceeded" : "") + ")";
  std::cout << "CRITERION " << c.id << " " << (o.pass ? "PASS" : "FAIL") << ": " << c.title << ": " << o.detail
            << "; " << timing << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool ok = true;
  bool found = false;
  for (const auto& c : kCriteria) {
    if (which == "all" || which == std::to_string(c.id)) {
      found = true;
      ok = run_one(c) && ok;
    }
  }
  if (!found) {
    std::cerr << "usage: acceptance <1-8|all>\n";
    return 2;
  }
  return ok ? 0 : 1;
}
