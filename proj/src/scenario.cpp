#include "bardina/scenario.hpp"

#include "bardina/checkpoint.hpp"
#include "bardina/errors.hpp"
#include "bardina/random_fields.hpp"

namespace bardina {

SpectralField kolmogorov_field(int resolution, int wavenumber, double amplitude) {
  SpectralField g(resolution);
  if (amplitude != 0.0) {
    // sin(s x) = (e^{isx} - e^{-isx}) / 2i
    g.set_mode({wavenumber, 0, 0}, {0.0, Complex(0.0, -amplitude / 2.0), 0.0});
  }
  return g;
}

SpectralField taylor_green_field(int resolution, double amplitude) {
  // sin x cos y cos z and cos x sin y cos z expanded over k in {+-1}^3.
  SpectralField u(resolution);
  const double q = amplitude / 8.0;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int sz : {-1, 1}) {
        const Complex a = Complex(0.0, -q * sx);
        const Complex b = Complex(0.0, q * sy);
        u.set_mode({sx, sy, sz}, {a, b, 0.0});
      }
    }
  }
  return u;
}

SpectralField make_forcing(const ForcingSpec& spec, int resolution) {
  if (spec.kind == "zero") {
    return SpectralField(resolution);
  }
  if (spec.kind == "kolmogorov") {
    return kolmogorov_field(resolution, spec.wavenumber, spec.amplitude);
  }
  if (spec.kind == "random_divfree") {
    return random_divfree_field(resolution, spec.kmax, spec.amplitude, spec.seed);
  }
  throw ConfigError("unknown forcing kind '" + spec.kind + "'", "forcing.kind");
}

SpectralField make_initial(const InitSpec& spec, int resolution) {
  if (spec.kind == "zero") {
    return SpectralField(resolution);
  }
  if (spec.kind == "shear") {
    return kolmogorov_field(resolution, 1, spec.amplitude);
  }
  if (spec.kind == "taylor_green") {
    return taylor_green_field(resolution, spec.amplitude);
  }
  if (spec.kind == "random_divfree") {
    return random_divfree_field(resolution, spec.kmax, spec.amplitude, spec.seed);
  }
  if (spec.kind == "from_checkpoint") {
    Checkpoint c;
    try {
      c = read_checkpoint(spec.path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), "init.path");
    }
    if (c.state.resolution() != resolution) {
      throw ConfigError("checkpoint resolution " + std::to_string(c.state.resolution()) +
                            " differs from solver.N = " + std::to_string(resolution),
                        "init.path");
    }
    return c.state;
  }
  throw ConfigError("unknown initial-data kind '" + spec.kind + "'", "init.kind");
}

std::string describe(const ForcingSpec& spec) {
  if (spec.kind == "kolmogorov") {
    return "kolmogorov(s=" + std::to_string(spec.wavenumber) + ",A=" + format_double(spec.amplitude) + ")";
  }
  if (spec.kind == "random_divfree") {
    return "random_divfree(kmax=" + format_double(spec.kmax) + ",amplitude=" + format_double(spec.amplitude) +
           ",seed=" + std::to_string(spec.seed) + ")";
  }
  return spec.kind;
}

std::string describe(const InitSpec& spec) {
  if (spec.kind == "shear" || spec.kind == "taylor_green") {
    return spec.kind + "(A=" + format_double(spec.amplitude) + ")";
  }
  if (spec.kind == "random_divfree") {
    return "random_divfree(kmax=" + format_double(spec.kmax) + ",A=" + format_double(spec.amplitude) +
           ",seed=" + std::to_string(spec.seed) + ")";
  }
  if (spec.kind == "from_checkpoint") {
    return "from_checkpoint(" + spec.path + ")";
  }
  return spec.kind;
}

}  // namespace bardina
