#pragma once

#include <array>
#include <memory>
#include <vector>

#include "bardina/grid_transform.hpp"
#include "bardina/spectral_field.hpp"

namespace bardina {

/// Norm selector: L2, H_alpha (|v|^2 + alpha |grad v|^2), H^{-3}, or the grid maximum.
class NormKind {
 public:
  enum class Tag { l2, h_alpha, h_minus3, linf };

  static NormKind l2() { return NormKind(Tag::l2, 0.0); }
  static NormKind h_alpha(double alpha);
  static NormKind h_minus3() { return NormKind(Tag::h_minus3, 0.0); }
  static NormKind linf() { return NormKind(Tag::linf, 0.0); }

  Tag tag() const { return tag_; }
  double alpha() const { return alpha_; }

 private:
  NormKind(Tag tag, double alpha) : tag_(tag), alpha_(alpha) {}
  Tag tag_;
  double alpha_;
};

/// Applies I - k k^T / |k|^2 to every mode k != 0; the mean is left unchanged.
SpectralField leray_project(const SpectralField& f);
void leray_project_in_place(SpectralField& f);

/// Multiplies mode k by 1 / (1 + alpha |k|^2).
SpectralField helmholtz_filter(const SpectralField& u, double alpha);
void helmholtz_filter_in_place(SpectralField& u, double alpha);
/// Multiplies mode k by 1 + alpha |k|^2.
SpectralField helmholtz_sharpen(const SpectralField& u, double alpha);

struct AdvectOptions {
  /// Padded grid is at least padding * N points per axis.
  double padding = 1.5;
  /// Require an alias-free product (padding >= 3/2).
  bool assert_exact = true;
};

/// Workspace for the dealiased quadratic term P_N Pi (u.grad) u.
///
/// Evaluates the traceless part of u (x) u on the padded grid (the trace is a
/// gradient and is removed by the projection), transforms back, truncates to
/// the retained modes and applies the Leray projector. Not thread-safe.
class Advector {
 public:
  explicit Advector(int resolution, AdvectOptions options = {});

  int resolution() const { return n_; }
  int grid() const { return m_; }
  void apply(const SpectralField& u, SpectralField& out);

 private:
  int n_;
  int m_;
  std::array<std::unique_ptr<GridTransform>, 5> slots_;
};

/// Pi (u.grad) u, dealiased; uses a per-thread cached workspace.
SpectralField advect(const SpectralField& u, AdvectOptions options = {});

double norm(const SpectralField& u, NormKind kind);
/// (2 pi)^3 sum (1 + |k|^2)^s |u_k|^2, square-rooted.
double sobolev_norm(const SpectralField& u, double s);
/// ||grad u||_{L2}^2
double gradient_energy(const SpectralField& u);
/// Real pairing consistent with norm(); kind must be L2 or H_alpha.
double inner(const SpectralField& u, const SpectralField& v, NormKind kind);

/// Symmetrized gradient (grad u + grad u^T)/2 sampled on an M^3 grid.
/// Entries are stored xx, yy, zz, xy, xz, yz per point.
struct StrainGrid {
  int grid = 0;
  std::array<std::vector<double>, 6> entries;
};
StrainGrid strain_on_grid(const SpectralField& u, int grid);

/// Largest eigenvalue of a symmetric 3x3 matrix given as xx, yy, zz, xy, xz, yz.
double symmetric_max_eigenvalue(const std::array<double, 6>& s);
/// Spectral radius of the same.
double symmetric_spectral_radius(const std::array<double, 6>& s);

/// max over grid points of lambda_max(-(grad u + grad u^T)/2); grid = 0 uses N.
double strain_sup(const SpectralField& u, int grid = 0);

}  // namespace bardina
