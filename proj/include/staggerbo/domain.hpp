#pragma once

#include <cstdint>

#include "staggerbo/rng.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

/// One point with i.i.d. uniform coordinates on [0,1]^d.
/// Throws std::invalid_argument for d < 1.
Point uniform_point(RngStream& rng, int d);

/// n points of an Owen-scrambled Sobol' sequence in [0,1]^d, starting at
/// sequence index `offset`. The scramble is keyed by the rng value (taken
/// by value: the same rng reproduces the same sequence, and successive
/// calls with increasing offsets continue one sequence).
/// n = 0 returns an empty set; d < 1 throws std::invalid_argument.
PointSet sobol_points(int n, int d, RngStream rng, std::int64_t offset = 0);

}  // namespace stagger
