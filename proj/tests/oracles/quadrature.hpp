#pragma once

#include <cmath>
#include <numbers>

#include "bardina/spectral_field.hpp"

namespace oracle {

// Evaluates u at a point by summing every retained mode explicitly.
inline bardina::RealTriple point_value(const bardina::SpectralField& u, double x, double y, double z) {
  bardina::RealTriple v{};
  const int K = u.max_mode();
  for (int a = -K; a <= K; ++a) {
    for (int b = -K; b <= K; ++b) {
      for (int c = -K; c <= K; ++c) {
        const auto coef = u.coeff({a, b, c});
        const bardina::Complex e = std::exp(bardina::Complex(0.0, a * x + b * y + c * z));
        for (int d = 0; d < 3; ++d) {
          v[d] += (coef[d] * e).real();
        }
      }
    }
  }
  return v;
}

// Rectangle rule on a uniform grid fine enough to integrate the product exactly.
inline double quadrature_inner(const bardina::SpectralField& u, const bardina::SpectralField& v, int grid) {
  const double h = 2.0 * std::numbers::pi / grid;
  double sum = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      for (int l = 0; l < grid; ++l) {
        const auto a = point_value(u, -std::numbers::pi + i * h, -std::numbers::pi + j * h, -std::numbers::pi + l * h);
        const auto b = point_value(v, -std::numbers::pi + i * h, -std::numbers::pi + j * h, -std::numbers::pi + l * h);
        sum += a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      }
    }
  }
  return sum * h * h * h;
}

}  // namespace oracle
