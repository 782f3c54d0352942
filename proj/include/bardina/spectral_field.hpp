#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bardina {

using Complex = std::complex<double>;
using ComplexTriple = std::array<Complex, 3>;
using RealTriple = std::array<double, 3>;

/// Integer wavevector on the 2pi-periodic torus.
struct Wavevector {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr long squared_norm() const {
    return static_cast<long>(x) * x + static_cast<long>(y) * y + static_cast<long>(z) * z;
  }
  constexpr Wavevector operator-() const { return {-x, -y, -z}; }
  friend constexpr bool operator==(const Wavevector&, const Wavevector&) = default;
};

/// Divergence tolerance used by the SpectralField invariant check.
inline constexpr double kDivergenceTolerance = 1e-12;

/// Volume of the torus [-pi, pi]^3.
double torus_volume();

/// Truncated Fourier representation of a real 3-component field on T^3.
///
/// Coefficients follow u(x) = sum_k c_k exp(i k.x). Only the half spectrum
/// k_z >= 0 is stored (the rest follows from Hermitian symmetry), laid out as
/// [component][i][j][l] with i, j in [0, N) and l in [0, N/2]. Index i maps to
/// k_x = i for i <= N/2 and i - N otherwise; the rows with |k| = N/2 are the
/// Nyquist modes and are kept at zero.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int resolution);

  int resolution() const { return n_; }
  int half_extent() const { return n_ / 2 + 1; }
  /// Largest retained |k_i| (N/2 - 1).
  int max_mode() const { return n_ / 2 - 1; }
  std::size_t modes_per_component() const { return static_cast<std::size_t>(n_) * n_ * half_extent(); }

  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n_ + j) * half_extent() + l;
  }
  int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }
  int slot(int k) const { return k >= 0 ? k : k + n_; }

  std::span<Complex> component(int c) {
    return {data_.data() + c * modes_per_component(), modes_per_component()};
  }
  std::span<const Complex> component(int c) const {
    return {data_.data() + c * modes_per_component(), modes_per_component()};
  }
  std::span<Complex> raw() { return data_; }
  std::span<const Complex> raw() const { return data_; }

  /// True if |k_i| <= N/2 - 1 for every axis.
  bool retains(Wavevector k) const;

  /// Coefficient triple at an arbitrary retained wavevector (conjugating for k_z < 0).
  ComplexTriple coeff(Wavevector k) const;
  /// Sets the coefficient at k and the conjugate at -k.
  void set_mode(Wavevector k, const ComplexTriple& c);
  /// Adds c at k and conj(c) at -k (k = 0 adds the real part once).
  void add_mode(Wavevector k, const ComplexTriple& c);

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  void axpy(double s, const SpectralField& other);
  void set_zero();

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend bool operator==(const SpectralField&, const SpectralField&) = default;

  /// Makes the k_z = 0 plane exactly Hermitian and the mean real; zeroes Nyquist modes.
  void symmetrize();

  /// Largest |c(-k) - conj c(k)| over the k_z = 0 plane.
  double hermitian_defect() const;
  /// Largest |k.c_k| / (|k||c_k| + floor) over k != 0.
  double divergence_defect() const;
  /// Largest coefficient magnitude on Nyquist rows.
  double nyquist_magnitude() const;
  double max_abs() const;
  bool all_finite() const;

  /// Checks the Hermitian, divergence-free and Nyquist invariants.
  bool is_valid(double div_tol = kDivergenceTolerance) const;

 private:
  int n_ = 0;
  std::vector<Complex> data_;
};

/// Calls f(i, j, l, k, weight) for every stored mode; weight counts the mode
/// and its conjugate partner so that sums over the stored half spectrum equal
/// sums over the full spectrum.
template <class F>
void for_each_mode(int n, F&& f) {
  const int h = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const int kx = i <= n / 2 ? i : i - n;
    for (int j = 0; j < n; ++j) {
      const int ky = j <= n / 2 ? j : j - n;
      for (int l = 0; l < h; ++l) {
        const double weight = (l == 0 || 2 * l == n) ? 1.0 : 2.0;
        f(i, j, l, Wavevector{kx, ky, l}, weight);
      }
    }
  }
}

/// Real 3-component values on an M^3 collocation grid of [-pi, pi)^3,
/// x_j = -pi + 2 pi j / M, stored [component][x][y][z].
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(int grid) : m_(grid), values_(3 * static_cast<std::size_t>(grid) * grid * grid, 0.0) {}

  int grid() const { return m_; }
  std::size_t points() const { return static_cast<std::size_t>(m_) * m_ * m_; }
  double& at(int c, int x, int y, int z) {
    return values_[((static_cast<std::size_t>(c) * m_ + x) * m_ + y) * m_ + z];
  }
  double at(int c, int x, int y, int z) const {
    return values_[((static_cast<std::size_t>(c) * m_ + x) * m_ + y) * m_ + z];
  }
  std::span<double> component(int c) { return {values_.data() + c * points(), points()}; }
  std::span<const double> component(int c) const { return {values_.data() + c * points(), points()}; }
  std::span<const double> raw() const { return values_; }
  bool all_finite() const;

 private:
  int m_ = 0;
  std::vector<double> values_;
};

}  // namespace bardina
