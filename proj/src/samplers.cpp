#include "staggerbo/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "staggerbo/domain.hpp"

namespace stagger {

double stagger_length_from_u(double u, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("stagger_length: k must be > 0");
    return std::exp(-k * u);
}

double stagger_length(RngStream& rng, double k) { return stagger_length_from_u(rng.uniform(), k); }

Point perturb(const Point& anchor, const Point& target, double s) {
    if (anchor.size() != target.size()) throw std::invalid_argument("perturb: dimension mismatch");
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("perturb: s outside [0,1]");
    Point x = anchor + s * (target - anchor);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    return x;
}

namespace {

Point sts_initial(const GpModel& model, int d, const StsConfig& cfg, RngStream& rng) {
    switch (cfg.init_mode) {
        case StsInit::ArgmaxMean:
            return argmax_mean(model, d, cfg.init_budget, rng);
        case StsInit::Uniform:
            return uniform_point(rng, d);
        case StsInit::BestMeasured:
            return model.best_point();
        case StsInit::ThompsonAtMeasured: {
            const Vec draw = joint_sample(model, model.data().points, rng);
            Eigen::Index which = 0;
            draw.maxCoeff(&which);
            return model.data().points.row(which).transpose();
        }
    }
    throw std::logic_error("sts_initial: unknown init mode");
}

}  // namespace

Point sts_sample(const GpModel& model, int d, const StsConfig& cfg, RngStream& rng) {
    if (cfg.iterations < 0 || !(cfg.exponent_range > 0.0))
        throw std::invalid_argument("sts_sample: invalid config");
    if (model.empty()) return uniform_point(rng, d);  // uniform p* prior

    Point anchor = sts_initial(model, d, cfg, rng);
    PointSet pair(2, d);
    for (int m = 0; m < cfg.iterations; ++m) {
        const Point target = uniform_point(rng, d);
        const double s = cfg.proposal_mode == StsProposal::Stagger
                             ? stagger_length(rng, cfg.exponent_range)
                             : rng.uniform();
        const Point proposal = perturb(anchor, target, s);
        pair.row(0) = anchor.transpose();
        pair.row(1) = proposal.transpose();
        const Vec draw = joint_sample(model, pair, rng);
        if (draw[1] > draw[0]) anchor = proposal;
    }
    return anchor;
}

Point ts_sample(const GpModel& model, int d, const TsConfig& cfg, RngStream& rng) {
    if (cfg.num_candidates < 1) throw std::invalid_argument("ts_sample: num_candidates must be >= 1");
    if (model.empty()) return uniform_point(rng, d);

    PointSet candidates(cfg.num_candidates, d);
    for (int i = 0; i < cfg.num_candidates; ++i)
        candidates.row(i) = uniform_point(rng, d).transpose();
    const Vec draw = joint_sample(model, candidates, rng);
    Eigen::Index which = 0;
    draw.maxCoeff(&which);
    return candidates.row(which).transpose();
}

std::pair<double, double> chord_extents(const Vec& x, const Vec& dir, int bisection_steps) {
    if (bisection_steps < 1) throw std::invalid_argument("chord_extents: steps must be >= 1");
    const double diag = std::sqrt(static_cast<double>(x.size()));
    int extra = 0;
    double hi0 = 1.0;
    while (hi0 < diag) {
        hi0 *= 2.0;
        ++extra;
    }
    const auto inside = [&](double t, double sign) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double v = x[i] + sign * t * dir[i];
            if (v < 0.0 || v > 1.0) return false;
        }
        return true;
    };
    const auto extent = [&](double sign) {
        double lo = 0.0, hi = hi0;
        for (int s = 0; s < bisection_steps + extra; ++s) {
            const double mid = 0.5 * (lo + hi);
            if (inside(mid, sign)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return lo;  // certified inside
    };
    return {extent(-1.0), extent(+1.0)};
}

Point pss_sample(const GpModel& model, int d, const PssConfig& cfg, RngStream& rng) {
    if (cfg.iterations < 1 || cfg.proposal_scale <= 0.0 || cfg.scale_up <= 1.0 ||
        cfg.scale_down <= 0.0 || cfg.scale_down >= 1.0)
        throw std::invalid_argument("pss_sample: invalid config");
    if (model.empty()) return uniform_point(rng, d);

    Point x = uniform_point(rng, d);
    double scale = cfg.proposal_scale;
    PointSet pair(2, d);
    for (int it = 0; it < cfg.iterations; ++it) {
        Vec dir(d);
        double norm = 0.0;
        do {
            for (int i = 0; i < d; ++i) dir[i] = rng.normal();
            norm = dir.norm();
        } while (norm == 0.0);
        dir /= norm;

        const auto [back, fwd] = chord_extents(x, dir, cfg.bisection_steps);
        const double chord = back + fwd;
        double t = rng.normal() * scale * chord;
        t = std::clamp(t, -back, fwd);
        Point proposal = x + t * dir;
        for (int i = 0; i < d; ++i) proposal[i] = std::clamp(proposal[i], 0.0, 1.0);

        pair.row(0) = x.transpose();
        pair.row(1) = proposal.transpose();
        const Vec draw = joint_sample(model, pair, rng);
        if (draw[1] > draw[0]) {
            x = proposal;
            scale *= cfg.scale_up;
        } else {
            scale *= cfg.scale_down;
        }
    }
    return x;
}

}  // namespace stagger
