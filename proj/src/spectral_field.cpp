#include "bardina/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bardina {

double torus_volume() {
  const double side = 2.0 * std::numbers::pi;
  return side * side * side;
}

SpectralField::SpectralField(int resolution) : n_(resolution) {
  if (resolution < 2 || resolution % 2 != 0) {
    throw std::invalid_argument("resolution must be an even integer >= 2");
  }
  data_.assign(3 * modes_per_component(), Complex{});
}

bool SpectralField::retains(Wavevector k) const {
  const int kmax = max_mode();
  return std::abs(k.x) <= kmax && std::abs(k.y) <= kmax && std::abs(k.z) <= kmax;
}

ComplexTriple SpectralField::coeff(Wavevector k) const {
  if (!retains(k)) {
    return {};
  }
  const bool flip = k.z < 0;
  const Wavevector q = flip ? -k : k;
  const std::size_t idx = index(slot(q.x), slot(q.y), q.z);
  ComplexTriple out;
  for (int c = 0; c < 3; ++c) {
    const Complex v = data_[c * modes_per_component() + idx];
    out[c] = flip ? std::conj(v) : v;
  }
  return out;
}

void SpectralField::set_mode(Wavevector k, const ComplexTriple& c) {
  if (!retains(k)) {
    throw std::out_of_range("wavevector outside the retained modes");
  }
  const auto write = [&](Wavevector q, bool conjugate) {
    if (q.z < 0) {
      return;
    }
    const std::size_t idx = index(slot(q.x), slot(q.y), q.z);
    for (int d = 0; d < 3; ++d) {
      data_[d * modes_per_component() + idx] = conjugate ? std::conj(c[d]) : c[d];
    }
  };
  if (k.x == 0 && k.y == 0 && k.z == 0) {
    for (int d = 0; d < 3; ++d) {
      data_[d * modes_per_component()] = c[d].real();
    }
    return;
  }
  write(k, false);
  write(-k, true);
}

void SpectralField::add_mode(Wavevector k, const ComplexTriple& c) {
  ComplexTriple sum = coeff(k);
  if (k.x == 0 && k.y == 0 && k.z == 0) {
    for (int d = 0; d < 3; ++d) {
      sum[d] += c[d].real();
    }
  } else {
    for (int d = 0; d < 3; ++d) {
      sum[d] += c[d];
    }
  }
  set_mode(k, sum);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.n_ != n_) {
    throw std::invalid_argument("resolution mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += other.data_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.n_ != n_) {
    throw std::invalid_argument("resolution mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] -= other.data_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : data_) {
    v *= s;
  }
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& other) {
  if (other.n_ != n_) {
    throw std::invalid_argument("resolution mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += s * other.data_[i];
  }
}

void SpectralField::set_zero() { std::fill(data_.begin(), data_.end(), Complex{}); }

void SpectralField::symmetrize() {
  const std::size_t stride = modes_per_component();
  for (int c = 0; c < 3; ++c) {
    Complex* d = data_.data() + c * stride;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const int kx = wavenumber(i);
        const int ky = wavenumber(j);
        const bool nyquist = 2 * std::abs(kx) == n_ || 2 * std::abs(ky) == n_;
        if (nyquist) {
          for (int l = 0; l < half_extent(); ++l) {
            d[index(i, j, l)] = 0.0;
          }
          continue;
        }
        d[index(i, j, n_ / 2)] = 0.0;
        // Representative of each (k, -k) pair on the k_z = 0 plane.
        if (kx > 0 || (kx == 0 && ky > 0)) {
          const std::size_t a = index(i, j, 0);
          const std::size_t b = index(slot(-kx), slot(-ky), 0);
          const Complex mean = 0.5 * (d[a] + std::conj(d[b]));
          d[a] = mean;
          d[b] = std::conj(mean);
        }
      }
    }
    d[0] = d[0].real();
  }
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  const std::size_t stride = modes_per_component();
  for (int c = 0; c < 3; ++c) {
    const Complex* d = data_.data() + c * stride;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const std::size_t a = index(i, j, 0);
        const std::size_t b = index(slot(-wavenumber(i)) % n_, slot(-wavenumber(j)) % n_, 0);
        worst = std::max(worst, std::abs(d[a] - std::conj(d[b])));
      }
    }
  }
  return worst;
}

double SpectralField::divergence_defect() const {
  const double floor = 1e-16 * max_abs() + std::numeric_limits<double>::min();
  double worst = 0.0;
  const std::size_t stride = modes_per_component();
  for_each_mode(n_, [&](int i, int j, int l, Wavevector k, double) {
    if (k.squared_norm() == 0) {
      return;
    }
    const std::size_t idx = index(i, j, l);
    const Complex c0 = data_[idx];
    const Complex c1 = data_[stride + idx];
    const Complex c2 = data_[2 * stride + idx];
    const Complex div = double(k.x) * c0 + double(k.y) * c1 + double(k.z) * c2;
    const double mag = std::sqrt(std::norm(c0) + std::norm(c1) + std::norm(c2));
    const double kn = std::sqrt(double(k.squared_norm()));
    worst = std::max(worst, std::abs(div) / (kn * mag + floor));
  });
  return worst;
}

double SpectralField::nyquist_magnitude() const {
  double worst = 0.0;
  const std::size_t stride = modes_per_component();
  for_each_mode(n_, [&](int i, int j, int l, Wavevector k, double) {
    if (2 * std::abs(k.x) == n_ || 2 * std::abs(k.y) == n_ || 2 * l == n_) {
      for (int c = 0; c < 3; ++c) {
        worst = std::max(worst, std::abs(data_[c * stride + index(i, j, l)]));
      }
    }
  });
  return worst;
}

double SpectralField::max_abs() const {
  double worst = 0.0;
  for (const auto& v : data_) {
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

bool SpectralField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

bool SpectralField::is_valid(double div_tol) const {
  if (n_ == 0 || !all_finite()) {
    return false;
  }
  const double scale = max_abs();
  if (nyquist_magnitude() != 0.0) {
    return false;
  }
  if (hermitian_defect() > 1e-12 * scale) {
    return false;
  }
  return divergence_defect() <= div_tol;
}

bool PhysicalField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace bardina
