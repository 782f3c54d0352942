#include "bardina/grid_transform.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "detail/caches.hpp"

namespace bardina {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

int transform_friendly_size(int n) {
  for (int m = std::max(n, 2);; ++m) {
    if (is_transform_friendly(m)) {
      return m;
    }
  }
}

bool is_transform_friendly(int n) {
  if (n < 2 || n % 2 != 0) {
    return false;
  }
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) {
      n /= p;
    }
  }
  return n == 1;
}

struct GridTransform::Plans {
  fftw_plan x_pos_bwd = nullptr;
  fftw_plan x_neg_bwd = nullptr;
  fftw_plan y_bwd = nullptr;
  fftw_plan z_bwd = nullptr;
  fftw_plan z_fwd = nullptr;
  fftw_plan y_fwd = nullptr;
  fftw_plan x_pos_fwd = nullptr;
  fftw_plan x_neg_fwd = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {x_pos_bwd, x_neg_bwd, y_bwd, z_bwd, z_fwd, y_fwd, x_pos_fwd, x_neg_fwd}) {
      if (p != nullptr) {
        fftw_destroy_plan(p);
      }
    }
  }
};

GridTransform::GridTransform(int modes, int grid)
    : n_(modes), m_(grid), k_(modes / 2 - 1), mz_(grid / 2 + 1), row_(2 * (grid / 2 + 1)) {
  if (modes < 2 || modes % 2 != 0) {
    throw std::invalid_argument("GridTransform: modes must be even and >= 2");
  }
  if (grid < modes) {
    throw std::invalid_argument("GridTransform: grid must be at least the mode count");
  }
  const std::size_t complex_count = static_cast<std::size_t>(m_) * m_ * mz_;
  buffer_ = reinterpret_cast<Complex*>(fftw_alloc_complex(complex_count));
  if (buffer_ == nullptr) {
    throw std::bad_alloc();
  }
  std::memset(static_cast<void*>(buffer_), 0, complex_count * sizeof(Complex));
  real_ = reinterpret_cast<double*>(buffer_);
  plans_ = std::make_unique<Plans>();

  const int lines = k_ + 1;
  const int x_stride = m_ * mz_;
  const unsigned flags = FFTW_ESTIMATE;
  std::lock_guard lock(planner_mutex());

  // Along x over the retained y rows and l <= K, in two row blocks.
  {
    fftw_iodim dim{m_, x_stride, x_stride};
    fftw_iodim pos_many[2] = {{lines, mz_, mz_}, {lines, 1, 1}};
    fftw_iodim neg_many[2] = {{k_, mz_, mz_}, {lines, 1, 1}};
    Complex* neg = buffer_ + static_cast<std::size_t>(m_ - k_) * mz_;
    plans_->x_pos_bwd = fftw_plan_guru_dft(1, &dim, 2, pos_many, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, flags);
    plans_->x_pos_fwd = fftw_plan_guru_dft(1, &dim, 2, pos_many, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, flags);
    if (k_ > 0) {
      plans_->x_neg_bwd = fftw_plan_guru_dft(1, &dim, 2, neg_many, as_fftw(neg), as_fftw(neg), FFTW_BACKWARD, flags);
      plans_->x_neg_fwd = fftw_plan_guru_dft(1, &dim, 2, neg_many, as_fftw(neg), as_fftw(neg), FFTW_FORWARD, flags);
    }
  }
  // Along y for every x and l <= K.
  {
    fftw_iodim dim{m_, mz_, mz_};
    fftw_iodim many[2] = {{m_, x_stride, x_stride}, {lines, 1, 1}};
    plans_->y_bwd = fftw_plan_guru_dft(1, &dim, 2, many, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, flags);
    plans_->y_fwd = fftw_plan_guru_dft(1, &dim, 2, many, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, flags);
  }
  // Real <-> half-complex along z for every (x, y).
  {
    fftw_iodim dim{m_, 1, 1};
    fftw_iodim c2r_many{m_ * m_, mz_, row_};
    fftw_iodim r2c_many{m_ * m_, row_, mz_};
    plans_->z_bwd = fftw_plan_guru_dft_c2r(1, &dim, 1, &c2r_many, as_fftw(buffer_), real_, flags);
    plans_->z_fwd = fftw_plan_guru_dft_r2c(1, &dim, 1, &r2c_many, real_, as_fftw(buffer_), flags);
  }
  for (fftw_plan p : {plans_->x_pos_bwd, plans_->y_bwd, plans_->z_bwd, plans_->z_fwd, plans_->y_fwd, plans_->x_pos_fwd}) {
    if (p == nullptr) {
      throw std::runtime_error("GridTransform: FFTW planning failed");
    }
  }
}

GridTransform::~GridTransform() {
  plans_.reset();
  fftw_free(buffer_);
}

void GridTransform::to_grid(std::span<const Complex> spectral) {
  const int hn = n_ / 2 + 1;
  if (spectral.size() != static_cast<std::size_t>(n_) * n_ * hn) {
    throw std::invalid_argument("GridTransform::to_grid: size mismatch");
  }
  std::memset(static_cast<void*>(buffer_), 0, static_cast<std::size_t>(m_) * m_ * mz_ * sizeof(Complex));
  for (int kx = -k_; kx <= k_; ++kx) {
    const int in_i = kx >= 0 ? kx : kx + n_;
    const int out_i = kx >= 0 ? kx : kx + m_;
    for (int ky = -k_; ky <= k_; ++ky) {
      const int in_j = ky >= 0 ? ky : ky + n_;
      const int out_j = ky >= 0 ? ky : ky + m_;
      const Complex* src = spectral.data() + (static_cast<std::size_t>(in_i) * n_ + in_j) * hn;
      Complex* dst = buffer_ + (static_cast<std::size_t>(out_i) * m_ + out_j) * mz_;
      std::memcpy(static_cast<void*>(dst), src, (k_ + 1) * sizeof(Complex));
    }
  }
  fftw_execute(plans_->x_pos_bwd);
  if (plans_->x_neg_bwd != nullptr) {
    fftw_execute(plans_->x_neg_bwd);
  }
  fftw_execute(plans_->y_bwd);
  fftw_execute(plans_->z_bwd);
}

void GridTransform::from_grid(std::span<Complex> spectral) {
  const int hn = n_ / 2 + 1;
  if (spectral.size() != static_cast<std::size_t>(n_) * n_ * hn) {
    throw std::invalid_argument("GridTransform::from_grid: size mismatch");
  }
  fftw_execute(plans_->z_fwd);
  fftw_execute(plans_->y_fwd);
  fftw_execute(plans_->x_pos_fwd);
  if (plans_->x_neg_fwd != nullptr) {
    fftw_execute(plans_->x_neg_fwd);
  }
  const double scale = 1.0 / (static_cast<double>(m_) * m_ * m_);
  std::fill(spectral.begin(), spectral.end(), Complex{});
  for (int kx = -k_; kx <= k_; ++kx) {
    const int out_i = kx >= 0 ? kx : kx + n_;
    const int in_i = kx >= 0 ? kx : kx + m_;
    for (int ky = -k_; ky <= k_; ++ky) {
      const int out_j = ky >= 0 ? ky : ky + n_;
      const int in_j = ky >= 0 ? ky : ky + m_;
      const Complex* src = buffer_ + (static_cast<std::size_t>(in_i) * m_ + in_j) * mz_;
      Complex* dst = spectral.data() + (static_cast<std::size_t>(out_i) * n_ + out_j) * hn;
      for (int l = 0; l <= k_; ++l) {
        dst[l] = src[l] * scale;
      }
    }
  }
}

namespace detail {

GridTransform& cached_transform(int modes, int grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<GridTransform>> cache;
  auto& slot = cache[{modes, grid}];
  if (!slot) {
    slot = std::make_unique<GridTransform>(modes, grid);
  }
  return *slot;
}

}  // namespace detail

namespace {

// Grid origin at -pi: exp(i k (x - pi)) = (-1)^k exp(i k x).
void apply_origin_sign(int n, std::span<Complex> component) {
  const int h = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const int kx = i <= n / 2 ? i : i - n;
    for (int j = 0; j < n; ++j) {
      const int ky = j <= n / 2 ? j : j - n;
      for (int l = 0; l < h; ++l) {
        if (((kx + ky + l) & 1) != 0) {
          component[(static_cast<std::size_t>(i) * n + j) * h + l] *= -1.0;
        }
      }
    }
  }
}

}  // namespace

PhysicalField to_physical(const SpectralField& u) {
  const int n = u.resolution();
  GridTransform& t = detail::cached_transform(n, n);
  PhysicalField out(n);
  std::vector<Complex> shifted(u.modes_per_component());
  for (int c = 0; c < 3; ++c) {
    const auto src = u.component(c);
    std::copy(src.begin(), src.end(), shifted.begin());
    apply_origin_sign(n, shifted);
    t.to_grid(shifted);
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        const double* row = t.row(x, y);
        for (int z = 0; z < n; ++z) {
          out.at(c, x, y, z) = row[z];
        }
      }
    }
  }
  return out;
}

SpectralField to_spectral(const PhysicalField& f) {
  const int n = f.grid();
  GridTransform& t = detail::cached_transform(n, n);
  SpectralField out(n);
  for (int c = 0; c < 3; ++c) {
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        double* row = t.row(x, y);
        for (int z = 0; z < n; ++z) {
          row[z] = f.at(c, x, y, z);
        }
      }
    }
    t.from_grid(out.component(c));
    apply_origin_sign(n, out.component(c));
  }
  return out;
}

}  // namespace bardina
