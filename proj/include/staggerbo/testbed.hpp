#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "staggerbo/types.hpp"

namespace stagger {

/// A benchmark objective under the maximization convention: larger
/// evaluate_unit values are better, everywhere.
struct TestFunction {
    std::string name;
    Vec lo, hi;  // native per-dimension bounds
    std::function<double(const Vec&)> raw;  // native coordinates, classical sign
    bool negate = false;                    // true when the classical form minimizes
    // Unit-box location and value of the global maximum, when closed-form.
    std::optional<std::pair<Point, double>> optimum;

    int dim() const { return static_cast<int>(lo.size()); }
};

/// Registry of the supported benchmark names.
std::vector<std::string> function_names();

/// Instantiate a named benchmark in dimension d. Throws ConfigError for
/// unknown names or d < 1.
TestFunction make_function(const std::string& name, int d);

/// Evaluate at a unit-box point: affine map to the native domain, then
/// sign-fix to the maximization convention. Out-of-box points throw.
double evaluate_unit(const TestFunction& fn, const Vec& x);

/// Measure-preserving unit-box re-parameterization: coordinate
/// permutation, then per-coordinate reflection, then toroidal shift.
struct Distortion {
    std::vector<int> permutation;
    std::vector<bool> reflections;
    Vec shifts;  // each in [0,1)
};

Distortion make_distortion(int d, std::uint64_t seed);

/// g(x): permute, reflect, shift (applied to the evaluation input).
Vec apply_distortion(const Distortion& dist, const Vec& x);
/// g^-1(x).
Vec invert_distortion(const Distortion& dist, const Vec& x);

/// The same objective re-parameterized by a seeded distortion; the
/// optimal value is preserved and the optimum location re-mapped.
TestFunction distort(const TestFunction& fn, std::uint64_t seed);

}  // namespace stagger
