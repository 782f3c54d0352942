#include "bardina/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "bardina/errors.hpp"
#include "detail/caches.hpp"

namespace bardina {

NormKind NormKind::h_alpha(double alpha) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("H_alpha norm requires alpha >= 0");
  }
  return NormKind(Tag::h_alpha, alpha);
}

namespace {

void require_same_resolution(const SpectralField& a, const SpectralField& b) {
  if (a.resolution() != b.resolution()) {
    throw ResolutionMismatch("resolution mismatch: " + std::to_string(a.resolution()) + " vs " +
                             std::to_string(b.resolution()));
  }
}

template <class Weight>
double weighted_energy(const SpectralField& u, Weight&& weight) {
  const std::size_t stride = u.modes_per_component();
  const auto data = u.raw();
  double sum = 0.0;
  for_each_mode(u.resolution(), [&](int i, int j, int l, Wavevector k, double mult) {
    const std::size_t idx = u.index(i, j, l);
    const double e = std::norm(data[idx]) + std::norm(data[stride + idx]) + std::norm(data[2 * stride + idx]);
    if (e != 0.0) {
      sum += mult * weight(k) * e;
    }
  });
  return torus_volume() * sum;
}

template <class Weight>
double weighted_pairing(const SpectralField& u, const SpectralField& v, Weight&& weight) {
  const std::size_t stride = u.modes_per_component();
  const auto a = u.raw();
  const auto b = v.raw();
  double sum = 0.0;
  for_each_mode(u.resolution(), [&](int i, int j, int l, Wavevector k, double mult) {
    const std::size_t idx = u.index(i, j, l);
    double p = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Complex x = a[c * stride + idx];
      const Complex y = b[c * stride + idx];
      p += x.real() * y.real() + x.imag() * y.imag();
    }
    if (p != 0.0) {
      sum += mult * weight(k) * p;
    }
  });
  return torus_volume() * sum;
}

}  // namespace

void leray_project_in_place(SpectralField& f) {
  const std::size_t stride = f.modes_per_component();
  auto d = f.raw();
  for_each_mode(f.resolution(), [&](int i, int j, int l, Wavevector k, double) {
    const long k2 = k.squared_norm();
    if (k2 == 0) {
      return;
    }
    const std::size_t idx = f.index(i, j, l);
    Complex& a = d[idx];
    Complex& b = d[stride + idx];
    Complex& c = d[2 * stride + idx];
    const Complex s = (double(k.x) * a + double(k.y) * b + double(k.z) * c) / double(k2);
    a -= double(k.x) * s;
    b -= double(k.y) * s;
    c -= double(k.z) * s;
  });
}

SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  leray_project_in_place(out);
  return out;
}

void helmholtz_filter_in_place(SpectralField& u, double alpha) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("helmholtz_filter: alpha must be >= 0");
  }
  if (alpha == 0.0) {
    return;
  }
  const std::size_t stride = u.modes_per_component();
  auto d = u.raw();
  for_each_mode(u.resolution(), [&](int i, int j, int l, Wavevector k, double) {
    const double factor = 1.0 / (1.0 + alpha * double(k.squared_norm()));
    const std::size_t idx = u.index(i, j, l);
    for (int c = 0; c < 3; ++c) {
      d[c * stride + idx] *= factor;
    }
  });
}

SpectralField helmholtz_filter(const SpectralField& u, double alpha) {
  SpectralField out = u;
  helmholtz_filter_in_place(out, alpha);
  return out;
}

SpectralField helmholtz_sharpen(const SpectralField& u, double alpha) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("helmholtz_sharpen: alpha must be >= 0");
  }
  SpectralField out = u;
  const std::size_t stride = out.modes_per_component();
  auto d = out.raw();
  for_each_mode(out.resolution(), [&](int i, int j, int l, Wavevector k, double) {
    const double factor = 1.0 + alpha * double(k.squared_norm());
    const std::size_t idx = out.index(i, j, l);
    for (int c = 0; c < 3; ++c) {
      d[c * stride + idx] *= factor;
    }
  });
  return out;
}

namespace detail {

int padded_grid(int resolution, double padding) {
  const int wanted = static_cast<int>(std::ceil(padding * resolution - 1e-9));
  return transform_friendly_size(std::max(wanted, resolution));
}

Advector& cached_advector(int resolution, const AdvectOptions& options) {
  thread_local std::map<std::tuple<int, double, bool>, std::unique_ptr<Advector>> cache;
  auto& slot = cache[{resolution, options.padding, options.assert_exact}];
  if (!slot) {
    slot = std::make_unique<Advector>(resolution, options);
  }
  return *slot;
}

}  // namespace detail

Advector::Advector(int resolution, AdvectOptions options) : n_(resolution) {
  if (options.assert_exact && options.padding < 1.5) {
    throw std::invalid_argument("advect: padding factor below 3/2 cannot give an alias-free product");
  }
  if (!(options.padding >= 1.0)) {
    throw std::invalid_argument("advect: padding factor must be >= 1");
  }
  m_ = detail::padded_grid(resolution, options.padding);
  for (auto& s : slots_) {
    s = std::make_unique<GridTransform>(n_, m_);
  }
}

void Advector::apply(const SpectralField& u, SpectralField& out) {
  if (u.resolution() != n_) {
    throw ResolutionMismatch("advect: field resolution does not match the workspace");
  }
  if (out.resolution() != n_) {
    out = SpectralField(n_);
  }
  for (int c = 0; c < 3; ++c) {
    slots_[c]->to_grid(u.component(c));
  }
  // Traceless part of u (x) u: Q11, Q22, Q12, Q13, Q23 (Q33 = -Q11 - Q22).
  constexpr double third = 1.0 / 3.0;
  for (int x = 0; x < m_; ++x) {
    for (int y = 0; y < m_; ++y) {
      double* r0 = slots_[0]->row(x, y);
      double* r1 = slots_[1]->row(x, y);
      double* r2 = slots_[2]->row(x, y);
      double* r3 = slots_[3]->row(x, y);
      double* r4 = slots_[4]->row(x, y);
      for (int z = 0; z < m_; ++z) {
        const double a = r0[z];
        const double b = r1[z];
        const double c = r2[z];
        const double aa = a * a;
        const double bb = b * b;
        const double cc = c * c;
        r0[z] = third * (2.0 * aa - bb - cc);
        r1[z] = third * (2.0 * bb - aa - cc);
        r2[z] = a * b;
        r3[z] = a * c;
        r4[z] = b * c;
      }
    }
  }
  // Products land in the three output components plus scratch for the other two.
  thread_local std::vector<Complex> q12;
  thread_local std::vector<Complex> q13;
  thread_local std::vector<Complex> q23;
  const std::size_t count = u.modes_per_component();
  q12.resize(count);
  q13.resize(count);
  q23.resize(count);
  slots_[0]->from_grid(out.component(0));
  slots_[1]->from_grid(out.component(1));
  slots_[2]->from_grid(q12);
  slots_[3]->from_grid(q13);
  slots_[4]->from_grid(q23);

  const std::size_t stride = count;
  auto d = out.raw();
  const Complex I(0.0, 1.0);
  for_each_mode(n_, [&](int i, int j, int l, Wavevector k, double) {
    const std::size_t idx = out.index(i, j, l);
    const Complex s11 = d[idx];
    const Complex s22 = d[stride + idx];
    const Complex s33 = -s11 - s22;
    const Complex s12 = q12[idx];
    const Complex s13 = q13[idx];
    const Complex s23 = q23[idx];
    const double kx = k.x;
    const double ky = k.y;
    const double kz = k.z;
    Complex nx = I * (kx * s11 + ky * s12 + kz * s13);
    Complex ny = I * (kx * s12 + ky * s22 + kz * s23);
    Complex nz = I * (kx * s13 + ky * s23 + kz * s33);
    const long k2 = k.squared_norm();
    if (k2 == 0) {
      nx = ny = nz = 0.0;
    } else {
      const Complex p = (kx * nx + ky * ny + kz * nz) / double(k2);
      nx -= kx * p;
      ny -= ky * p;
      nz -= kz * p;
    }
    d[idx] = nx;
    d[stride + idx] = ny;
    d[2 * stride + idx] = nz;
  });
  out.symmetrize();
}

SpectralField advect(const SpectralField& u, AdvectOptions options) {
  Advector& a = detail::cached_advector(u.resolution(), options);
  SpectralField out(u.resolution());
  a.apply(u, out);
  return out;
}

double norm(const SpectralField& u, NormKind kind) {
  switch (kind.tag()) {
    case NormKind::Tag::l2:
      return std::sqrt(weighted_energy(u, [](Wavevector) { return 1.0; }));
    case NormKind::Tag::h_alpha: {
      const double alpha = kind.alpha();
      return std::sqrt(weighted_energy(u, [alpha](Wavevector k) { return 1.0 + alpha * double(k.squared_norm()); }));
    }
    case NormKind::Tag::h_minus3:
      return sobolev_norm(u, -3.0);
    case NormKind::Tag::linf: {
      const PhysicalField f = to_physical(u);
      double worst = 0.0;
      const std::size_t pts = f.points();
      const auto a = f.component(0);
      const auto b = f.component(1);
      const auto c = f.component(2);
      for (std::size_t p = 0; p < pts; ++p) {
        worst = std::max(worst, a[p] * a[p] + b[p] * b[p] + c[p] * c[p]);
      }
      return std::sqrt(worst);
    }
  }
  return 0.0;
}

double sobolev_norm(const SpectralField& u, double s) {
  return std::sqrt(weighted_energy(u, [s](Wavevector k) { return std::pow(1.0 + double(k.squared_norm()), s); }));
}

double gradient_energy(const SpectralField& u) {
  return weighted_energy(u, [](Wavevector k) { return double(k.squared_norm()); });
}

double inner(const SpectralField& u, const SpectralField& v, NormKind kind) {
  require_same_resolution(u, v);
  switch (kind.tag()) {
    case NormKind::Tag::l2:
      return weighted_pairing(u, v, [](Wavevector) { return 1.0; });
    case NormKind::Tag::h_alpha: {
      const double alpha = kind.alpha();
      return weighted_pairing(u, v, [alpha](Wavevector k) { return 1.0 + alpha * double(k.squared_norm()); });
    }
    default:
      throw std::invalid_argument("inner: only L2 and H_alpha pairings are defined");
  }
}

StrainGrid strain_on_grid(const SpectralField& u, int grid) {
  const int n = u.resolution();
  if (grid == 0) {
    grid = n;
  }
  GridTransform& t = detail::cached_transform(n, grid);
  const std::size_t stride = u.modes_per_component();
  const auto d = u.raw();
  std::vector<Complex> entry(stride);
  StrainGrid out;
  out.grid = grid;
  const Complex I(0.0, 1.0);
  // (row, column) pairs for xx, yy, zz, xy, xz, yz.
  constexpr int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  for (int e = 0; e < 6; ++e) {
    const int a = pairs[e][0];
    const int b = pairs[e][1];
    for_each_mode(n, [&](int i, int j, int l, Wavevector k, double) {
      const double kk[3] = {double(k.x), double(k.y), double(k.z)};
      const std::size_t idx = u.index(i, j, l);
      entry[idx] = 0.5 * I * (kk[b] * d[a * stride + idx] + kk[a] * d[b * stride + idx]);
    });
    t.to_grid(entry);
    auto& values = out.entries[e];
    values.resize(static_cast<std::size_t>(grid) * grid * grid);
    std::size_t p = 0;
    for (int x = 0; x < grid; ++x) {
      for (int y = 0; y < grid; ++y) {
        const double* row = t.row(x, y);
        for (int z = 0; z < grid; ++z) {
          values[p++] = row[z];
        }
      }
    }
  }
  return out;
}

namespace {

// Smallest and largest eigenvalues of a symmetric 3x3 matrix (trigonometric method).
std::pair<double, double> symmetric_extreme_eigenvalues(const std::array<double, 6>& s) {
  const double a11 = s[0], a22 = s[1], a33 = s[2], a12 = s[3], a13 = s[4], a23 = s[5];
  const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
  if (p1 == 0.0) {
    return {std::min({a11, a22, a33}), std::max({a11, a22, a33})};
  }
  const double q = (a11 + a22 + a33) / 3.0;
  const double d1 = a11 - q, d2 = a22 - q, d3 = a33 - q;
  const double p2 = d1 * d1 + d2 * d2 + d3 * d3 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double b11 = d1 / p, b22 = d2 / p, b33 = d3 / p;
  const double b12 = a12 / p, b13 = a13 / p, b23 = a23 / p;
  const double det = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) + b13 * (b12 * b23 - b22 * b13);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double largest = q + 2.0 * p * std::cos(phi);
  const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {smallest, largest};
}

}  // namespace

double symmetric_max_eigenvalue(const std::array<double, 6>& s) { return symmetric_extreme_eigenvalues(s).second; }

double symmetric_spectral_radius(const std::array<double, 6>& s) {
  const auto [lo, hi] = symmetric_extreme_eigenvalues(s);
  return std::max(std::abs(lo), std::abs(hi));
}

double strain_sup(const SpectralField& u, int grid) {
  const StrainGrid s = strain_on_grid(u, grid);
  const std::size_t pts = s.entries[0].size();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < pts; ++p) {
    const std::array<double, 6> neg = {-s.entries[0][p], -s.entries[1][p], -s.entries[2][p],
                                       -s.entries[3][p], -s.entries[4][p], -s.entries[5][p]};
    worst = std::max(worst, symmetric_max_eigenvalue(neg));
  }
  return worst;
}

}  // namespace bardina
