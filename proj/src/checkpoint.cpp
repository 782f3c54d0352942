#include "bardina/checkpoint.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace bardina {

namespace {

constexpr char kMagic[5] = {'B', 'R', 'D', 'N', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) {
    b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw std::runtime_error("checkpoint: truncated file");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | b[i];
  }
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  const int n = c.state.resolution();
  out.write(kMagic, sizeof kMagic);
  put_u64(out, static_cast<std::uint64_t>(n));
  put_f64(out, c.alpha);
  put_f64(out, c.gamma);
  put_f64(out, c.time);
  const int h = n / 2;
  for (int a = -h; a <= h; ++a) {
    for (int b = -h; b <= h; ++b) {
      for (int d = -h; d <= h; ++d) {
        const auto v = c.state.coeff({a, b, d});
        for (const auto& x : v) {
          put_f64(out, x.real());
          put_f64(out, x.imag());
        }
      }
    }
  }
  if (!out) {
    throw std::runtime_error("checkpoint: write failed");
  }
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  }
  write_checkpoint(out, c);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const std::uint64_t n64 = get_u64(in);
  if (n64 < 2 || n64 > 1024 || n64 % 2 != 0) {
    throw std::runtime_error("checkpoint: invalid resolution " + std::to_string(n64));
  }
  const int n = static_cast<int>(n64);
  Checkpoint c;
  c.alpha = get_f64(in);
  c.gamma = get_f64(in);
  c.time = get_f64(in);
  c.state = SpectralField(n);
  const int h = n / 2;
  const int side = n + 1;
  const int kmax = c.state.max_mode();
  std::vector<ComplexTriple> all(static_cast<std::size_t>(side) * side * side);
  const auto at = [&](int a, int b, int d) -> ComplexTriple& {
    return all[(static_cast<std::size_t>(a + h) * side + (b + h)) * side + (d + h)];
  };
  double scale = 0.0;
  for (auto& v : all) {
    for (auto& x : v) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw std::runtime_error("checkpoint: non-finite coefficient");
      }
      x = {re, im};
      scale = std::max(scale, std::abs(x));
    }
  }
  double hermitian = 0.0;
  for (int a = -h; a <= h; ++a) {
    for (int b = -h; b <= h; ++b) {
      for (int d = -h; d <= h; ++d) {
        const ComplexTriple& v = at(a, b, d);
        const bool retained = std::abs(a) <= kmax && std::abs(b) <= kmax && std::abs(d) <= kmax;
        if (!retained) {
          for (const auto& x : v) {
            if (x != Complex(0.0)) {
              throw std::runtime_error("checkpoint: nonzero Nyquist coefficient");
            }
          }
          continue;
        }
        const ComplexTriple& mirror = at(-a, -b, -d);
        for (int i = 0; i < 3; ++i) {
          hermitian = std::max(hermitian, std::abs(v[i] - std::conj(mirror[i])));
        }
        if (d > 0 || (d == 0 && (a > 0 || (a == 0 && b >= 0)))) {
          c.state.set_mode({a, b, d}, v);
        }
      }
    }
  }
  if (hermitian > 1e-12 * scale) {
    throw std::runtime_error("checkpoint: coefficients are not Hermitian-symmetric");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("checkpoint: trailing bytes");
  }
  return c;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  try {
    return read_checkpoint(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) + " (" + path.string() + ")");
  }
}

}  // namespace bardina
