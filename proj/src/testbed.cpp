#include "staggerbo/testbed.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "staggerbo/rng.hpp"

namespace stagger {

namespace {

using std::numbers::pi;

double ackley(const Vec& x) {
    const double d = static_cast<double>(x.size());
    double sq = 0.0, cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::numbers::e;
}

double dixonprice(const Vec& x) {
    double f = (x[0] - 1.0) * (x[0] - 1.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
        const double t = 2.0 * x[i] * x[i] - x[i - 1];
        f += (i + 1) * t * t;
    }
    return f;
}

double griewank(const Vec& x) {
    double sum = 0.0, prod = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sum += x[i] * x[i] / 4000.0;
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return sum - prod + 1.0;
}

double levy(const Vec& x) {
    const auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
    const double w0 = w(0);
    double f = std::sin(pi * w0) * std::sin(pi * w0);
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double wi = w(i);
        const double s = std::sin(pi * wi + 1.0);
        f += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
    }
    const double wd = w(x.size() - 1);
    const double s = std::sin(2.0 * pi * wd);
    f += (wd - 1.0) * (wd - 1.0) * (1.0 + s * s);
    return f;
}

double michalewicz(const Vec& x) {
    constexpr double m = 10.0;
    double f = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double s = std::sin((i + 1) * x[i] * x[i] / pi);
        f -= std::sin(x[i]) * std::pow(s, 2.0 * m);
    }
    return f;
}

double rastrigin(const Vec& x) {
    double f = 10.0 * static_cast<double>(x.size());
    for (double v : x) f += v * v - 10.0 * std::cos(2.0 * pi * v);
    return f;
}

double rosenbrock(const Vec& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = x[i] - 1.0;
        f += 100.0 * a * a + b * b;
    }
    return f;
}

// The sphere target used by the sampler diagnostics: already a
// maximization problem on the unit box, peak value 0 at 0.65 * 1.
double sphere_unit(const Vec& x) {
    double f = 0.0;
    for (double v : x) f += (v - 0.65) * (v - 0.65);
    return -f;
}

double stybtang(const Vec& x) {
    double f = 0.0;
    for (double v : x) f += v * v * v * v - 16.0 * v * v + 5.0 * v;
    return 0.5 * f;
}

Vec to_native(const TestFunction& fn, const Vec& x) {
    return fn.lo.array() + x.array() * (fn.hi.array() - fn.lo.array());
}

Point native_opt_to_unit(const Vec& native, const Vec& lo, const Vec& hi) {
    return ((native - lo).array() / (hi - lo).array()).matrix();
}

}  // namespace

std::vector<std::string> function_names() {
    return {"ackley",      "dixonprice", "griewank",   "levy",   "michalewicz",
            "rastrigin",   "rosenbrock", "sphere",     "stybtang"};
}

TestFunction make_function(const std::string& name, int d) {
    if (d < 1) throw ConfigError("make_function: dimension must be >= 1");
    TestFunction fn;
    fn.name = name;
    const auto box = [&](double lo, double hi) {
        fn.lo = Vec::Constant(d, lo);
        fn.hi = Vec::Constant(d, hi);
    };
    if (name == "ackley") {
        box(-32.768, 32.768);
        fn.raw = ackley;
        fn.negate = true;
        fn.optimum = {native_opt_to_unit(Vec::Zero(d), fn.lo, fn.hi), 0.0};
    } else if (name == "dixonprice") {
        box(-10.0, 10.0);
        fn.raw = dixonprice;
        fn.negate = true;
    } else if (name == "griewank") {
        box(-600.0, 600.0);
        fn.raw = griewank;
        fn.negate = true;
        fn.optimum = {native_opt_to_unit(Vec::Zero(d), fn.lo, fn.hi), 0.0};
    } else if (name == "levy") {
        box(-10.0, 10.0);
        fn.raw = levy;
        fn.negate = true;
        fn.optimum = {native_opt_to_unit(Vec::Ones(d), fn.lo, fn.hi), 0.0};
    } else if (name == "michalewicz") {
        box(0.0, pi);
        fn.raw = michalewicz;
        fn.negate = true;
    } else if (name == "rastrigin") {
        box(-5.12, 5.12);
        fn.raw = rastrigin;
        fn.negate = true;
        fn.optimum = {native_opt_to_unit(Vec::Zero(d), fn.lo, fn.hi), 0.0};
    } else if (name == "rosenbrock") {
        box(-5.0, 10.0);
        fn.raw = rosenbrock;
        fn.negate = true;
        fn.optimum = {native_opt_to_unit(Vec::Ones(d), fn.lo, fn.hi), 0.0};
    } else if (name == "sphere") {
        box(0.0, 1.0);
        fn.raw = sphere_unit;
        fn.negate = false;
        fn.optimum = {Vec::Constant(d, 0.65), 0.0};
    } else if (name == "stybtang") {
        box(-5.0, 5.0);
        fn.raw = stybtang;
        fn.negate = true;
    } else {
        throw ConfigError("make_function: unknown function '" + name + "'");
    }
    return fn;
}

double evaluate_unit(const TestFunction& fn, const Vec& x) {
    if (x.size() != fn.lo.size()) throw std::invalid_argument("evaluate_unit: dimension mismatch");
    if (!x.allFinite() || x.minCoeff() < 0.0 || x.maxCoeff() > 1.0)
        throw std::invalid_argument("evaluate_unit: point outside [0,1]^d");
    const double v = fn.raw(to_native(fn, x));
    return fn.negate ? -v : v;
}

Distortion make_distortion(int d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("make_distortion: dimension must be >= 1");
    RngStream rng(seed, 0x44495354ull);
    Distortion dist;
    dist.permutation.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dist.permutation[static_cast<std::size_t>(i)] = i;
    for (int i = d - 1; i > 0; --i)
        std::swap(dist.permutation[static_cast<std::size_t>(i)],
                  dist.permutation[rng.below(static_cast<std::uint64_t>(i + 1))]);
    dist.reflections.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dist.reflections[static_cast<std::size_t>(i)] = rng.uniform() < 0.5;
    dist.shifts.resize(d);
    for (int i = 0; i < d; ++i) dist.shifts[i] = rng.uniform();
    return dist;
}

namespace {

double frac01(double v) {
    double f = v - std::floor(v);
    if (f >= 1.0) f = 0.0;  // guard against rounding at the seam
    return f;
}

}  // namespace

Vec apply_distortion(const Distortion& dist, const Vec& x) {
    const auto d = x.size();
    Vec out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double v = x[dist.permutation[static_cast<std::size_t>(i)]];
        if (dist.reflections[static_cast<std::size_t>(i)]) v = 1.0 - v;
        out[i] = frac01(v + dist.shifts[i]);
    }
    return out;
}

Vec invert_distortion(const Distortion& dist, const Vec& x) {
    const auto d = x.size();
    Vec out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double v = frac01(x[i] - dist.shifts[i] + 1.0);
        if (dist.reflections[static_cast<std::size_t>(i)]) v = 1.0 - v;
        out[dist.permutation[static_cast<std::size_t>(i)]] = v;
    }
    return out;
}

TestFunction distort(const TestFunction& fn, std::uint64_t seed) {
    const int d = fn.dim();
    const Distortion dist = make_distortion(d, seed);
    TestFunction base = fn;  // owned copy for the closure
    TestFunction out;
    out.name = fn.name;
    out.lo = Vec::Zero(d);
    out.hi = Vec::Ones(d);
    out.negate = false;
    out.raw = [base, dist](const Vec& x) { return evaluate_unit(base, apply_distortion(dist, x)); };
    if (fn.optimum) out.optimum = {invert_distortion(dist, fn.optimum->first), fn.optimum->second};
    return out;
}

}  // namespace stagger
