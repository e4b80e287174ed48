#include "staggerbo/mtv.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "staggerbo/domain.hpp"
#include "staggerbo/optimize.hpp"

namespace stagger {

PointSet pstar_samples(const GpModel& model, int d, int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("pstar_samples: n must be >= 1");
    const StsConfig cfg{};
    PointSet out(n, d);
    for (int i = 0; i < n; ++i) {
        RngStream sub = rng.fork(static_cast<std::uint64_t>(i));
        out.row(i) = sts_sample(model, d, cfg, sub).transpose();
    }
    return out;
}

double mtv_objective(const GpModel& model, const PointSet& pstar_points, const PointSet& arms) {
    if (pstar_points.rows() == 0) throw std::invalid_argument("mtv_objective: no p* points");
    if (arms.rows() == 0) throw std::invalid_argument("mtv_objective: no arms");
    return conditional_variance(model, pstar_points, arms).sum();
}

namespace {

PointSet unstack(const Vec& flat, int q, int d) {
    PointSet arms(q, d);
    for (int i = 0; i < q; ++i) arms.row(i) = flat.segment(i * d, d).transpose();
    return arms;
}

Vec stack(const PointSet& arms) {
    Vec flat(arms.rows() * arms.cols());
    for (int i = 0; i < arms.rows(); ++i)
        flat.segment(i * arms.cols(), arms.cols()) = arms.row(i).transpose();
    return flat;
}

}  // namespace

BatchDesign design_batch(const GpModel& model, int d, const MtvConfig& cfg, RngStream& rng,
                         PStarSource source) {
    if (cfg.num_pstar_samples < 1 || cfg.num_arms < 1 || cfg.minimizer_starts < 1 ||
        cfg.minimizer_steps < 0)
        throw std::invalid_argument("design_batch: invalid config");

    const int q = cfg.num_arms;
    PointSet pstar(cfg.num_pstar_samples, d);
    if (source == PStarSource::Sts) {
        StsConfig sts = cfg.sts;
        for (int i = 0; i < cfg.num_pstar_samples; ++i) {
            RngStream sub = rng.fork(static_cast<std::uint64_t>(i));
            pstar.row(i) = sts_sample(model, d, sts, sub).transpose();
        }
    } else {
        for (int i = 0; i < cfg.num_pstar_samples; ++i) {
            RngStream sub = rng.fork(static_cast<std::uint64_t>(i));
            pstar.row(i) = pss_sample(model, d, cfg.pss, sub).transpose();
        }
    }

    // Frozen p* points make the objective deterministic during descent.
    const BoxObjective neg_objective = [&](const Vec& flat) {
        return -mtv_objective(model, pstar, unstack(flat, q, d));
    };

    RngStream start_rng = rng.fork(0x5354415254ull);
    PointSet starts(cfg.minimizer_starts, q * d);
    std::vector<int> index(static_cast<std::size_t>(cfg.num_pstar_samples));
    std::iota(index.begin(), index.end(), 0);
    for (int s = 0; s < cfg.minimizer_starts; ++s) {
        if (s % 2 == 0) {
            // Random q-subset of the p* points (with replacement when q
            // exceeds the pool).
            PointSet sub(q, d);
            for (int i = static_cast<int>(index.size()) - 1; i > 0; --i)
                std::swap(index[static_cast<std::size_t>(i)],
                          index[start_rng.below(static_cast<std::uint64_t>(i + 1))]);
            for (int i = 0; i < q; ++i)
                sub.row(i) = pstar.row(index[static_cast<std::size_t>(i % index.size())]);
            starts.row(s) = stack(sub).transpose();
        } else {
            starts.row(s) =
                stack(sobol_points(q, d, start_rng.fork(static_cast<std::uint64_t>(s)))).transpose();
        }
    }

    const BoxOptimum best = multistart_ascend(neg_objective, {}, starts, cfg.minimizer_steps);
    BatchDesign design;
    design.arms = unstack(best.x, q, d);
    design.objective_value = mtv_objective(model, pstar, design.arms);
    return design;
}

}  // namespace stagger
