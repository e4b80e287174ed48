#pragma once

#include <functional>

#include "staggerbo/types.hpp"

namespace stagger {

struct BoxOptimum {
    Vec x;
    double value = 0.0;
};

using BoxObjective = std::function<double(const Vec&)>;
using BoxGradient = std::function<Vec(const Vec&)>;

/// Central-difference gradient on [0,1]^d, one-sided at the box faces.
Vec numeric_gradient(const BoxObjective& f, const Vec& x, double step = 1e-4);

/// Maximize f over [0,1]^d from x0 by projected gradient ascent with an
/// adaptive step and monotone acceptance; `steps` outer iterations.
/// Pass an empty gradient to fall back to central differences.
BoxOptimum ascend_box(const BoxObjective& f, const BoxGradient& grad, Vec x0, int steps);

/// Best of several ascents. Exact value ties break toward the
/// lexicographically smallest point, so the result is deterministic.
BoxOptimum multistart_ascend(const BoxObjective& f, const BoxGradient& grad, const PointSet& starts,
                             int steps);

}  // namespace stagger
