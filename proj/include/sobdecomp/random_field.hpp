#pragma once

#include <cstdint>

#include "sobdecomp/function_space.hpp"

namespace sobdecomp {

/// Seeded random GridFunction: uniform nodal noise in [-1, 1] smoothed by
/// a fixed [1 2 1]/4 stencil (two passes). Reproducible given (mesh, seed).
GridFunction smooth_random(const MeshPtr& mesh, std::uint64_t seed,
                           int smoothing_passes = 2);

}  // namespace sobdecomp
