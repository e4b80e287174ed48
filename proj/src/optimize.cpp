#include "staggerbo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stagger {

namespace {

Vec clamp_box(Vec x) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    return x;
}

bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

}  // namespace

Vec numeric_gradient(const BoxObjective& f, const Vec& x, double step) {
    const int d = static_cast<int>(x.size());
    Vec g(d);
    Vec xp = x;
    for (int k = 0; k < d; ++k) {
        const double lo = std::max(0.0, x[k] - step);
        const double hi = std::min(1.0, x[k] + step);
        if (hi <= lo) {
            g[k] = 0.0;
            continue;
        }
        xp[k] = hi;
        const double fh = f(xp);
        xp[k] = lo;
        const double fl = f(xp);
        xp[k] = x[k];
        g[k] = (fh - fl) / (hi - lo);
    }
    return g;
}

BoxOptimum ascend_box(const BoxObjective& f, const BoxGradient& grad, Vec x0, int steps) {
    Vec x = clamp_box(std::move(x0));
    double fx = f(x);
    BoxOptimum best{x, fx};

    double t = 0.1;
    for (int it = 0; it < steps; ++it) {
        const Vec g = grad ? grad(x) : numeric_gradient(f, x);
        const double gnorm = g.norm();
        if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;

        bool accepted = false;
        for (int bt = 0; bt < 24 && t >= 1e-12; ++bt) {
            Vec xn = clamp_box(x + (t / gnorm) * g);
            if ((xn - x).lpNorm<Eigen::Infinity>() == 0.0) {
                t *= 0.5;
                continue;
            }
            const double fn = f(xn);
            if (fn > fx) {
                x = std::move(xn);
                fx = fn;
                t *= 1.8;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (fx > best.value) best = {x, fx};
        if (!accepted && t < 1e-12) break;
    }
    if (fx > best.value) best = {x, fx};
    return best;
}

BoxOptimum multistart_ascend(const BoxObjective& f, const BoxGradient& grad, const PointSet& starts,
                             int steps) {
    if (starts.rows() == 0) throw std::invalid_argument("multistart_ascend: no starts");
    BoxOptimum best;
    bool have = false;
    for (int s = 0; s < starts.rows(); ++s) {
        BoxOptimum cand = ascend_box(f, grad, starts.row(s).transpose(), steps);
        if (!have || cand.value > best.value ||
            (cand.value == best.value && lex_less(cand.x, best.x))) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

}  // namespace stagger
