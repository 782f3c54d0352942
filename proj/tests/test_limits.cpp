#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bardina/errors.hpp"
#include "bardina/limits.hpp"
#include "fixtures.hpp"
#include "oracles/fields.hpp"

using namespace bardina;

namespace {

SolverParams params(double dt, double horizon, int n = 8, int sample_every = 1) {
  SolverParams p;
  p.gamma = 1.0;
  p.resolution = n;
  p.dt = dt;
  p.horizon = horizon;
  p.sample_every = sample_every;
  return p;
}

Trajectory constant_traj(const SpectralField& u, std::vector<double> times) {
  Trajectory t;
  t.forcing = SpectralField(u.resolution());
  for (double s : times) t.samples.push_back({s, u});
  return t;
}

SweepShared shared_tg(int n, double dt, double horizon, int sample_every = 1, double forcing = 1.0) {
  SweepShared s;
  s.base = params(dt, horizon, n, sample_every);
  s.forcing = fixture::shear_sin(n, forcing);
  s.initial = fixture::taylor_green(n, 1.0);
  s.rule = InitRule::filtered;
  return s;
}

}  // namespace

TEST(InitRule, FilteredScalesEachMode) {
  const auto u = fixture::shear_cos(8, 2.0);
  EXPECT_EQ(initial_for_alpha(u, 0.5, InitRule::fixed), u);
  const auto f = initial_for_alpha(u, 0.5, InitRule::filtered);
  EXPECT_NEAR(f.coeff({1, 0, 0})[1].real(), 1.0 / std::sqrt(1.5), 1e-15);
  EXPECT_EQ(init_rule_from_string(to_string(InitRule::filtered)), InitRule::filtered);
  EXPECT_THROW(init_rule_from_string("other"), std::invalid_argument);
}

TEST(Sweep, ValidatesAlphas) {
  const auto s = shared_tg(8, 0.01, 0.02);
  EXPECT_THROW(alpha_sweep(s, {}), std::invalid_argument);
  EXPECT_THROW(alpha_sweep(s, {0.1, 0.0}), std::invalid_argument);
  EXPECT_THROW(alpha_sweep(s, {0.01, 0.1}), std::invalid_argument);
}

TEST(Sweep, LanesDoNotChangeResults) {
  const auto s = shared_tg(8, 0.01, 0.1);
  const std::vector<double> alphas{0.1, 0.05, 0.02, 0.01};
  const auto a = alpha_sweep(s, alphas, 1);
  const auto b = alpha_sweep(s, alphas, 3);
  ASSERT_EQ(a.members.size(), 4u);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    EXPECT_EQ(a.members[i].params.alpha, alphas[i]);
    ASSERT_EQ(a.members[i].samples.size(), b.members[i].samples.size());
    for (std::size_t j = 0; j < a.members[i].samples.size(); ++j) {
      EXPECT_EQ(a.members[i].samples[j].state, b.members[i].samples[j].state);
    }
  }
  EXPECT_GT(a.initial_bound, 0.0);
  EXPECT_GE(a.trajectory_bound, a.initial_bound);
  EXPECT_EQ(a.finest_alpha(), 0.01);
}

TEST(Sweep, BlowUpNamesAlpha) {
  auto s = shared_tg(16, 0.01, 0.1);
  s.initial = fixture::taylor_green(16, 500.0);
  s.rule = InitRule::fixed;
  try {
    alpha_sweep(s, {0.1, 1e-4});
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

TEST(TrajDistance, SingleModeValue) {
  const double a = 1.5;
  const auto u = constant_traj(fixture::shear_cos(8, a), {0.0});
  const auto z = constant_traj(SpectralField(8), {0.0});
  const double vol = std::pow(2 * std::numbers::pi, 3);
  // Two modes of magnitude a/2, weight (1 + 1)^{-3}.
  EXPECT_NEAR(traj_distance(u, z), std::sqrt(vol * a * a / 2.0 / 8.0), 1e-12);
}

TEST(TrajDistance, MetricProperties) {
  const std::vector<double> ts{0.0, 0.1, 0.2};
  const auto a = constant_traj(oracle::random_divfree(8, 3, 1), ts);
  const auto b = constant_traj(oracle::random_divfree(8, 3, 2), ts);
  const auto c = constant_traj(oracle::random_divfree(8, 3, 3), ts);
  EXPECT_EQ(traj_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(traj_distance(a, b), traj_distance(b, a));
  EXPECT_LE(traj_distance(a, c), traj_distance(a, b) + traj_distance(b, c) + 1e-14);
  EXPECT_GT(traj_distance(a, b), 0.0);
}

TEST(TrajDistance, WindowAndWeights) {
  const std::vector<double> ts{0.0, 0.1, 0.2};
  const auto a = constant_traj(fixture::shear_cos(8, 1.0), ts);
  const auto z = constant_traj(SpectralField(8), ts);
  const double full = traj_distance(a, z);
  TrajMetricConfig cfg;
  cfg.window_start = 0.05;
  EXPECT_NEAR(traj_distance(a, z, cfg), full, 1e-14);
  cfg.weights = {1.0, 1.0};
  EXPECT_NEAR(traj_distance(a, z, cfg), 2 * full, 1e-14);
  cfg.weights = {1.0};
  EXPECT_THROW(traj_distance(a, z, cfg), std::invalid_argument);
  cfg.weights = {1.0, 0.0};
  EXPECT_THROW(traj_distance(a, z, cfg), std::invalid_argument);
  EXPECT_THROW(traj_distance(a, constant_traj(SpectralField(8), {0.0, 0.1, 0.3})), std::invalid_argument);
  EXPECT_THROW(traj_distance(a, constant_traj(SpectralField(8), {0.0})), std::invalid_argument);
}

TEST(MEstimate, ZeroTestFunctionAndMinimum) {
  const auto fam1 = alpha_sweep(shared_tg(8, 0.01, 0.1), {0.1, 0.05});
  auto s2 = shared_tg(8, 0.01, 0.1);
  s2.initial *= 0.5;
  const auto fam2 = alpha_sweep(s2, {0.1, 0.05});
  const TestFunction zero;
  const auto m1 = m_estimate(fam1, zero, 0.1);
  EXPECT_NEAR(m1.value, std::pow(norm(fam1.finest().at_time(0.1), NormKind::h_alpha(0.05)), 2), 1e-12);
  EXPECT_EQ(m1.label, "upper estimate");
  const auto both = m_estimate({&fam1, &fam2}, zero, 0.1);
  EXPECT_EQ(both.family, 1u);
  EXPECT_LT(both.value, m1.value);
}

TEST(MProperties, AllHoldOnSmallSweep) {
  const auto fam = alpha_sweep(shared_tg(8, 0.01, 0.2, 2), {0.1, 0.05});
  const auto phi = TestFunction::random(11, 2, 3, 0.5);
  MPropertyOptions opts;
  opts.shift = 0.1;
  const auto reports = check_m_properties(fam, phi, {0.0, 0.04, 0.08, 0.12, 0.16, 0.2}, opts);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.passed()) << r.name << " margin " << r.margin();
    EXPECT_FALSE(r.samples.empty()) << r.name;
  }
  // Shift by one sample: restarted run reproduces the original.
  for (const auto& s : reports[2].samples) EXPECT_LE(s.lhs - s.rhs, 1e-12 * (1 + s.rhs));
}

TEST(Absorbing, ZeroInitialDataStaysInside) {
  const auto traj = simulate(params(0.01, 0.5, 8, 5), fixture::shear_sin(8, 1.0), SpectralField(8));
  const auto r = check_absorbing(traj);
  EXPECT_TRUE(r.report.passed());
  EXPECT_EQ(r.entry_time, 0.0);
  EXPECT_EQ(r.envelope_entry_time, 0.0);
}

TEST(Absorbing, LargeDataEntersLater) {
  auto p = params(0.01, 3.0, 8, 10);
  p.alpha = 0.05;
  const auto g = fixture::shear_sin(8, 0.2);
  const double big_g = std::pow(norm(g, NormKind::l2()), 2);
  auto u0 = fixture::taylor_green(8, 1.0);
  u0 *= std::sqrt(20 * big_g) / norm(u0, NormKind::h_alpha(0.05));
  const auto r = check_absorbing(simulate(p, g, u0));
  EXPECT_TRUE(r.report.passed()) << r.report.margin();
  EXPECT_GT(r.entry_time, 0.0);
  EXPECT_LE(r.entry_time, 3.0);
  EXPECT_NEAR(r.envelope_entry_time, std::log(20.0) / 2.0, 1e-9);
}

TEST(Absorbing, UnforcedWarns) {
  auto p = params(0.01, 0.2, 8, 5);
  p.alpha = 0.05;
  const auto r = check_absorbing(simulate(p, SpectralField(8), fixture::taylor_green(8, 1.0)));
  EXPECT_TRUE(r.report.passed());
  EXPECT_EQ(r.entry_time, 0.0);
  EXPECT_FALSE(r.report.warnings.empty());
}

TEST(DimensionBound, ValuesAndScaling) {
  EXPECT_NEAR(dimension_bound(1.0, 1.0, 1.0), 1.0 / (12 * std::numbers::pi), 1e-15);
  const double base = dimension_bound(0.7, 0.3, 1.3);
  EXPECT_NEAR(dimension_bound(1.4, 0.3, 1.3) / base, 4.0, 1e-12);
  EXPECT_NEAR(dimension_bound(0.7, 0.075, 1.3) / base, 32.0, 1e-12);
  EXPECT_THROW(dimension_bound(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(dimension_bound(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Semicontinuity, ReferenceAgainstItself) {
  std::vector<double> ts;
  for (int i = 0; i < 30; ++i) ts.push_back(0.1 * i);
  std::vector<Trajectory> ref{constant_traj(oracle::random_divfree(8, 3, 4), ts)};
  std::vector<Trajectory> near{constant_traj(oracle::random_divfree(8, 3, 4), ts)};
  auto shifted = oracle::random_divfree(8, 3, 4);
  shifted += fixture::shear_cos(8, 0.1);
  std::vector<Trajectory> far{constant_traj(shifted, ts)};
  SemicontinuityOptions opts;
  opts.entry_time = 0.0;
  const auto table = semicontinuity_diag({{0.1, far}, {0.01, near}}, ref, opts);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_GT(table.rows[0].gap, 0.0);
  EXPECT_EQ(table.rows[1].gap, 0.0);
  EXPECT_TRUE(table.nonincreasing);
  EXPECT_EQ(table.reference_windows, 5u);
  const auto flipped = semicontinuity_diag({{0.1, near}, {0.01, far}}, ref, opts);
  EXPECT_FALSE(flipped.nonincreasing);
  opts.entry_time = 2.5;
  EXPECT_THROW(semicontinuity_diag({{0.1, near}}, ref, opts), std::invalid_argument);
}

TEST(WeakStrong, IdenticalFamiliesPass) {
  auto s = shared_tg(8, 0.01, 0.1, 1, 0.0);
  s.initial = fixture::shear_cos(8, 1.0);
  const auto fam = alpha_sweep(s, {0.1, 0.05});
  const auto r = weak_strong_check(fam, fam);
  EXPECT_EQ(r.verdict, Verdict::pass);
  ASSERT_EQ(r.samples.size(), 1u);
  EXPECT_EQ(r.samples[0].lhs, 0.0);
}

TEST(WeakStrong, RoughLimitIsSkipped) {
  auto s = shared_tg(8, 0.01, 0.1, 1, 0.0);
  s.initial = fixture::single_mode(8, {3, 0, 0}, {0.0, 1.0, 0.0});
  const auto fam = alpha_sweep(s, {0.1, 0.05});
  EXPECT_GT(spectral_tail_fraction(fam.finest().initial()), 0.5);
  const auto r = weak_strong_check(fam, fam);
  EXPECT_EQ(r.verdict, Verdict::skipped);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Aitken, RecoversGeometricLimit) {
  EXPECT_NEAR(aitken_limit({2.0 + 1.0, 2.0 + 0.5, 2.0 + 0.25}), 2.0, 1e-14);
  EXPECT_EQ(aitken_limit({1.0, 1.0, 1.0}), 1.0);
  EXPECT_EQ(aitken_limit({3.0}), 3.0);
  EXPECT_EQ(aitken_limit({}), 0.0);
}
