#include "bardina/random_fields.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bardina/spectral_ops.hpp"

namespace bardina {

SpectralField random_divfree_field(int resolution, double kmax, double l2_amplitude, std::uint64_t seed) {
  if (!(kmax >= 1.0)) {
    throw std::invalid_argument("random field: kmax must be >= 1");
  }
  if (!(l2_amplitude >= 0.0)) {
    throw std::invalid_argument("random field: amplitude must be >= 0");
  }
  SpectralField u(resolution);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int K = u.max_mode();
  const double k2max = kmax * kmax;
  for (int a = -K; a <= K; ++a) {
    for (int b = -K; b <= K; ++b) {
      for (int c = 0; c <= K; ++c) {
        const Wavevector k{a, b, c};
        const double k2 = double(k.squared_norm());
        if (k2 == 0.0 || k2 > k2max) {
          continue;
        }
        if (c == 0 && (a < 0 || (a == 0 && b < 0))) {
          continue;
        }
        ComplexTriple v;
        for (auto& x : v) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          x = {re, im};
        }
        u.set_mode(k, v);
      }
    }
  }
  leray_project_in_place(u);
  u.symmetrize();
  const double n = norm(u, NormKind::l2());
  if (n > 0.0) {
    u *= l2_amplitude / n;
  }
  return u;
}

}  // namespace bardina
