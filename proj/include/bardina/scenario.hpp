#pragma once

#include <string>

#include "bardina/config.hpp"
#include "bardina/spectral_field.hpp"

namespace bardina {

/// Forcing field at the given resolution; seed-deterministic.
SpectralField make_forcing(const ForcingSpec& spec, int resolution);
/// Initial filtered velocity; from_checkpoint requires a matching resolution.
SpectralField make_initial(const InitSpec& spec, int resolution);

/// (0, a sin(s x), 0)
SpectralField kolmogorov_field(int resolution, int wavenumber, double amplitude);
/// a (sin x cos y cos z, -cos x sin y cos z, 0)
SpectralField taylor_green_field(int resolution, double amplitude);

std::string describe(const ForcingSpec& spec);
std::string describe(const InitSpec& spec);

}  // namespace bardina
