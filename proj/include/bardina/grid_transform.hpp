#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "bardina/spectral_field.hpp"

namespace bardina {

/// Smallest M >= n that is even and has no prime factor above 7.
int transform_friendly_size(int n);
/// True if n is even and has no prime factor above 7.
bool is_transform_friendly(int n);

/// Pruned FFT between one component of an N-mode half spectrum and a real
/// M^3 grid (M >= N). Only the lines that can hold retained modes are
/// transformed in the first two passes. Owns its buffer; the FFTW plans are
/// bound to that buffer, so instances are not copyable and must not be shared
/// across threads.
class GridTransform {
 public:
  GridTransform(int modes, int grid);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  int modes() const { return n_; }
  int grid() const { return m_; }

  /// Synthesizes sum_k c_k exp(i k.x) on the grid x_j = 2 pi j / M.
  void to_grid(std::span<const Complex> spectral);
  /// Analyzes the grid values into retained coefficients (scaled by 1/M^3).
  /// Destroys the grid contents.
  void from_grid(std::span<Complex> spectral);

  /// Grid value at (x, y, z); rows are padded to 2 (M/2 + 1) doubles.
  double& at(int x, int y, int z) { return real_[(static_cast<std::size_t>(x) * m_ + y) * row_ + z]; }
  double at(int x, int y, int z) const { return real_[(static_cast<std::size_t>(x) * m_ + y) * row_ + z]; }
  /// Start of the z-row for (x, y).
  double* row(int x, int y) { return real_ + (static_cast<std::size_t>(x) * m_ + y) * row_; }
  const double* row(int x, int y) const { return real_ + (static_cast<std::size_t>(x) * m_ + y) * row_; }

 private:
  struct Plans;

  int n_;
  int m_;
  int k_;    // largest retained |k|
  int mz_;   // complex extent along z
  int row_;  // padded real row length
  Complex* buffer_ = nullptr;
  double* real_ = nullptr;
  std::unique_ptr<Plans> plans_;
};

/// Dense spectral <-> physical transforms on the N^3 collocation grid of [-pi, pi)^3.
PhysicalField to_physical(const SpectralField& u);
/// Inverse of to_physical; modes outside |k_i| <= N/2 - 1 are discarded.
SpectralField to_spectral(const PhysicalField& f);

}  // namespace bardina
