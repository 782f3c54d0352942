#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bardina/errors.hpp"
#include "bardina/grid_transform.hpp"
#include "bardina/spectral_ops.hpp"
#include "fixtures.hpp"
#include "oracles/convolution.hpp"
#include "oracles/fields.hpp"
#include "oracles/quadrature.hpp"

using namespace bardina;

using fixture::shear_cos;
using fixture::shear_sin;
using fixture::single_mode;
using fixture::taylor_green;

TEST(Leray, GradientModeAnnihilated) {
  auto f = single_mode(8, {1, 0, 0}, {1.0, 0.0, 0.0});
  auto p = leray_project(f);
  EXPECT_EQ(p.coeff({1, 0, 0})[0], Complex(0.0));
}

TEST(Leray, DivergenceFreeModeUnchanged) {
  auto f = single_mode(8, {1, 0, 0}, {0.0, 1.0, 0.0});
  auto p = leray_project(f);
  EXPECT_EQ(p.coeff({1, 0, 0})[1], Complex(1.0));
}

TEST(Leray, DiagonalWavevectorByHand) {
  auto f = single_mode(8, {1, 1, 0}, {1.0, 0.0, 0.0});
  auto c = leray_project(f).coeff({1, 1, 0});
  EXPECT_NEAR(c[0].real(), 0.5, 1e-15);
  EXPECT_NEAR(c[1].real(), -0.5, 1e-15);
  EXPECT_EQ(c[2], Complex(0.0));
}

TEST(Leray, MeanUntouchedAndIdempotent) {
  auto f = oracle::random_divfree(16, 5, 3);
  // add a gradient part and a mean
  f.add_mode({2, 1, 0}, {Complex(2.0, 1.0), Complex(1.0, 0.5), 0.0});
  f.add_mode({0, 0, 0}, {1.5, -2.0, 0.25});
  auto p = leray_project(f);
  EXPECT_EQ(p.coeff({0, 0, 0}), f.coeff({0, 0, 0}));
  EXPECT_LE(p.divergence_defect(), kDivergenceTolerance);
  EXPECT_LE(oracle::max_diff(leray_project(p), p), 1e-14 * p.max_abs());
}

TEST(Filter, ExamplesAndInverse) {
  auto u = oracle::random_divfree(16, 6, 5);
  EXPECT_EQ(helmholtz_filter(u, 0.0), u);
  auto s = single_mode(8, {1, 0, 0}, {0.0, Complex(3.0, 1.0), 0.0});
  EXPECT_EQ(helmholtz_filter(s, 1.0).coeff({1, 0, 0})[1], Complex(1.5, 0.5));
  auto t = single_mode(8, {2, 0, 0}, {0.0, 4.0, 0.0});
  EXPECT_EQ(helmholtz_filter(t, 0.25).coeff({2, 0, 0})[1], Complex(2.0));
  EXPECT_LE(oracle::max_diff(helmholtz_filter(helmholtz_sharpen(u, 0.3), 0.3), u), 1e-15 * u.max_abs());
  EXPECT_THROW(helmholtz_filter(u, -1.0), std::invalid_argument);
}

TEST(Filter, CommutesWithProjection) {
  auto f = oracle::random_divfree(16, 6, 7);
  f.add_mode({1, 2, 3}, {1.0, 1.0, 1.0});
  auto a = leray_project(helmholtz_filter(f, 0.1));
  auto b = helmholtz_filter(leray_project(f), 0.1);
  EXPECT_LE(oracle::max_diff(a, b), 1e-14 * f.max_abs());
}

TEST(Advect, ShearAndZero) {
  EXPECT_EQ(advect(shear_sin(16, 2.0)).max_abs(), 0.0);
  EXPECT_EQ(advect(SpectralField(16)).max_abs(), 0.0);
}

TEST(Advect, MatchesBruteForceConvolution) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto u = oracle::random_divfree(8, 3, seed);
    auto fast = advect(u);
    auto slow = oracle::brute_force_advection(u);
    EXPECT_LE(oracle::max_diff(fast, slow), 1e-12 * slow.max_abs()) << seed;
    EXPECT_EQ(fast.coeff({0, 0, 0}), (ComplexTriple{}));
  }
  auto tg = taylor_green(8, 1.0);
  auto slow = oracle::brute_force_advection(tg);
  EXPECT_LE(oracle::max_diff(advect(tg), slow), 1e-12 * slow.max_abs());
}

TEST(Advect, EnergyOrthogonality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto u = oracle::random_divfree(16, 7, 100 + seed);
    const double pairing = inner(advect(u), u, NormKind::l2());
    const double scale = norm(u, NormKind::l2()) * std::pow(sobolev_norm(u, 1.0), 2);
    EXPECT_LE(std::abs(pairing), 1e-10 * scale) << seed;
  }
}

TEST(Advect, RejectsUnderPadding) {
  EXPECT_THROW(Advector(16, AdvectOptions{1.2, true}), std::invalid_argument);
  EXPECT_NO_THROW(Advector(16, AdvectOptions{1.2, false}));
}

TEST(Norm, SingleModeParseval) {
  const double a = 1.7;
  auto u = shear_cos(16, a);
  const double vol = torus_volume();
  EXPECT_NEAR(std::pow(norm(u, NormKind::l2()), 2), a * a * vol / 2, 1e-12);
  EXPECT_NEAR(std::pow(norm(u, NormKind::h_alpha(1.0)), 2), a * a * vol, 1e-12);
  EXPECT_NEAR(norm(u, NormKind::linf()), a, 1e-14);
  for (auto k : {NormKind::l2(), NormKind::h_alpha(0.5), NormKind::h_minus3(), NormKind::linf()}) {
    EXPECT_EQ(norm(SpectralField(8), k), 0.0);
  }
  EXPECT_THROW(NormKind::h_alpha(-0.1), std::invalid_argument);
}

TEST(Norm, Monotonicity) {
  auto u = oracle::random_divfree(16, 7, 9);
  const double l2 = norm(u, NormKind::l2());
  for (double a : {0.0, 0.01, 1.0}) {
    EXPECT_LE(l2, norm(u, NormKind::h_alpha(a)) * (1 + 1e-15));
  }
  EXPECT_LE(norm(u, NormKind::h_minus3()), l2);
}

TEST(Inner, ConsistencyAndQuadrature) {
  auto u = oracle::random_divfree(8, 3, 11);
  auto v = oracle::random_divfree(8, 3, 12);
  EXPECT_NEAR(inner(u, u, NormKind::l2()), std::pow(norm(u, NormKind::l2()), 2), 1e-12);
  EXPECT_DOUBLE_EQ(inner(u, v, NormKind::h_alpha(0.3)), inner(v, u, NormKind::h_alpha(0.3)));
  const double q = oracle::quadrature_inner(u, v, 8);
  EXPECT_NEAR(inner(u, v, NormKind::l2()), q, 1e-12 * std::abs(q) + 1e-12);
  auto a = single_mode(8, {1, 0, 0}, {0.0, 1.0, 0.0});
  auto b = single_mode(8, {0, 2, 0}, {1.0, 0.0, 0.0});
  EXPECT_EQ(inner(a, b, NormKind::l2()), 0.0);
  EXPECT_THROW(inner(a, SpectralField(16), NormKind::l2()), ResolutionMismatch);
  EXPECT_THROW(inner(a, b, NormKind::linf()), std::invalid_argument);
}

TEST(Strain, Examples) {
  EXPECT_EQ(strain_sup(single_mode(16, {0, 0, 0}, {1.0, 2.0, 3.0})), 0.0);
  EXPECT_NEAR(strain_sup(shear_sin(16, 3.0)), 1.5, 1e-14);
  // Rigid rotations are not periodic; check the eigenvalue helpers directly.
  EXPECT_EQ(symmetric_max_eigenvalue({0, 0, 0, 0, 0, 0}), 0.0);
  EXPECT_NEAR(symmetric_max_eigenvalue({0, 0, 0, 0.5, 0, 0}), 0.5, 1e-15);
  EXPECT_NEAR(symmetric_spectral_radius({1, 2, -4, 0, 0, 0}), 4.0, 1e-15);
  EXPECT_NEAR(symmetric_max_eigenvalue({2, 2, 2, 0, 0, 0}), 2.0, 1e-15);
  EXPECT_NEAR(symmetric_max_eigenvalue({1, 1, 1, 1, 1, 1}), 3.0, 1e-14);
}

TEST(Transform, RoundTrip) {
  auto u = oracle::random_divfree(16, 7, 21);
  auto back = to_spectral(to_physical(u));
  EXPECT_LE(oracle::max_diff(u, back), 1e-13 * u.max_abs());
  auto c = shear_cos(8, 1.0);
  auto f = to_physical(c);
  const double h = 2.0 * std::numbers::pi / 8;
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(f.at(1, i, 3, 5), std::cos(-std::numbers::pi + i * h), 1e-15);
  }
  auto z = to_physical(SpectralField(8));
  for (double x : z.raw()) EXPECT_EQ(x, 0.0);
}

TEST(Transform, ParsevalMatchesGridQuadrature) {
  auto u = oracle::random_divfree(16, 7, 22);
  auto f = to_physical(u);
  double sum = 0.0;
  for (double x : f.raw()) sum += x * x;
  const double h = 2.0 * std::numbers::pi / 16;
  EXPECT_NEAR(sum * h * h * h, std::pow(norm(u, NormKind::l2()), 2), 1e-12 * sum * h * h * h);
}

TEST(Transform, FriendlySizes) {
  EXPECT_EQ(transform_friendly_size(48), 48);
  EXPECT_EQ(transform_friendly_size(45), 48);
  EXPECT_FALSE(is_transform_friendly(22));
  EXPECT_TRUE(is_transform_friendly(210));
}

TEST(Field, Invariants) {
  auto u = oracle::random_divfree(16, 7, 23);
  EXPECT_TRUE(u.is_valid(kDivergenceTolerance));
  EXPECT_EQ(u.nyquist_magnitude(), 0.0);
  EXPECT_LE(u.hermitian_defect(), 0.0);
  auto adv = advect(u);
  EXPECT_TRUE(adv.is_valid(kDivergenceTolerance));
}
