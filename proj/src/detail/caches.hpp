#pragma once

#include "bardina/grid_transform.hpp"
#include "bardina/spectral_ops.hpp"

namespace bardina::detail {

// Per-thread workspaces keyed by size; planning happens once per thread.
GridTransform& cached_transform(int modes, int grid);
Advector& cached_advector(int resolution, const AdvectOptions& options);

// Padded grid size used for alias-free products at this resolution.
int padded_grid(int resolution, double padding);

}  // namespace bardina::detail
