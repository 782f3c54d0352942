#pragma once

#include <cmath>
#include <numbers>

#include "bardina/grid_transform.hpp"
#include "bardina/spectral_field.hpp"

namespace fixture {

using namespace bardina;

inline SpectralField single_mode(int n, Wavevector k, ComplexTriple c) {
  SpectralField u(n);
  u.set_mode(k, c);
  return u;
}

// (0, a sin x, 0)
inline SpectralField shear_sin(int n, double a) {
  return single_mode(n, {1, 0, 0}, {0.0, Complex(0.0, -a / 2.0), 0.0});
}
// (0, a cos x, 0)
inline SpectralField shear_cos(int n, double a) { return single_mode(n, {1, 0, 0}, {0.0, a / 2.0, 0.0}); }

// a (sin x cos y cos z, -cos x sin y cos z, 0), sampled and transformed.
inline SpectralField taylor_green(int n, double a) {
  PhysicalField f(n);
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double x = -std::numbers::pi + i * h, y = -std::numbers::pi + j * h, z = -std::numbers::pi + l * h;
        f.at(0, i, j, l) = a * std::sin(x) * std::cos(y) * std::cos(z);
        f.at(1, i, j, l) = -a * std::cos(x) * std::sin(y) * std::cos(z);
      }
  return to_spectral(f);
}

}  // namespace fixture
