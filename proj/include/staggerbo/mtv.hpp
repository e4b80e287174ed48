#pragma once

#include "staggerbo/gp.hpp"
#include "staggerbo/rng.hpp"
#include "staggerbo/samplers.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

struct MtvConfig {
    int num_pstar_samples = 16;
    int num_arms = 1;
    int minimizer_starts = 4;
    int minimizer_steps = 100;
    StsConfig sts{};  // sampler for the p* draws
    PssConfig pss{};
};

/// Which p* sampler feeds the batch objective.
enum class PStarSource { Sts, Pss };

struct BatchDesign {
    PointSet arms;           // q x d, all in [0,1]^d
    double objective_value;  // mtv_objective(arms) at return time
};

/// n independent p* draws (canonical STS config), each from its own
/// forked sub-stream. Empty model: n uniform points.
PointSet pstar_samples(const GpModel& model, int d, int n, RngStream& rng);

/// Sum over p* points of the posterior variance after conditioning on
/// hypothetical observations at `arms`.
double mtv_objective(const GpModel& model, const PointSet& pstar_points, const PointSet& arms);

/// Draw p* points once, then minimize the summed conditional variance
/// over the stacked q*d arm vector by multi-start projected descent with
/// central-difference gradients. Starts come from q-subsets of the p*
/// points plus Sobol' batches; the result never scores worse than its
/// best start.
BatchDesign design_batch(const GpModel& model, int d, const MtvConfig& cfg, RngStream& rng,
                         PStarSource source = PStarSource::Sts);

}  // namespace stagger
