#pragma once

#include <filesystem>
#include <iosfwd>

#include "bardina/spectral_field.hpp"

namespace bardina {

struct Checkpoint {
  SpectralField state;
  double alpha = 0.0;
  double gamma = 0.0;
  double time = 0.0;
};

/// Binary layout: "BRDN1", N (uint64), alpha, gamma, t (float64), then for
/// k in [-N/2, N/2]^3 in lexicographic order (k_x slowest) the three complex
/// components as (re, im) float64 pairs. Everything little-endian.
void write_checkpoint(std::ostream& out, const Checkpoint& c);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
/// Validates magic, size, finiteness, Hermitian symmetry and zero Nyquist modes.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace bardina
