#pragma once

#include <cstdint>

#include "bardina/spectral_field.hpp"

namespace bardina {

/// Complex Gaussian coefficients on 0 < |k| <= kmax (Euclidean), Leray-projected
/// and rescaled to the requested L2 norm. Deterministic in the seed.
SpectralField random_divfree_field(int resolution, double kmax, double l2_amplitude, std::uint64_t seed);

}  // namespace bardina
