#pragma once

#include <cmath>
#include <utility>

#include "staggerbo/gp.hpp"
#include "staggerbo/rng.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

enum class StsInit {
    ArgmaxMean,         // canonical: start at the posterior-mean maximizer
    Uniform,            // ablation "sts-ui"
    BestMeasured,       // ablation "sts-m"
    ThompsonAtMeasured  // ablation "sts-t"
};

enum class StsProposal {
    Stagger,  // log-uniform perturbation length
    Uniform   // ablation "sts-ns"
};

struct StsConfig {
    int iterations = 30;                       // refinement steps M
    double exponent_range = std::log(1e6);     // k: lengths log-uniform on [e^-k, 1]
    StsInit init_mode = StsInit::ArgmaxMean;
    StsProposal proposal_mode = StsProposal::Stagger;
    SearchBudget init_budget{};                // for the ArgmaxMean initializer
};

struct TsConfig {
    int num_candidates = 1000;
};

struct PssConfig {
    int iterations = 100;
    double proposal_scale = 0.5;  // initial, relative to chord length; adaptive
    double scale_up = 1.1;
    double scale_down = 0.9;
    int bisection_steps = 16;
};

/// Perturbation length s = exp(-k U), U ~ Uniform[0,1): log-uniform on
/// (e^-k, 1].
double stagger_length(RngStream& rng, double k);
/// Deterministic core of stagger_length for a given U.
double stagger_length_from_u(double u, double k);

/// x_a + s (x_t - x_a); stays inside the unit box for s in [0,1].
Point perturb(const Point& anchor, const Point& target, double s);

/// Stagger Thompson sample from p*(x). Empty model: uniform point.
Point sts_sample(const GpModel& model, int d, const StsConfig& cfg, RngStream& rng);

/// Candidate-set Thompson sample: argmax of one joint draw over
/// num_candidates uniform candidates. Empty model: uniform point.
Point ts_sample(const GpModel& model, int d, const TsConfig& cfg, RngStream& rng);

/// Hit-and-Run p* sampler with Gaussian chord proposals and adaptive
/// scale. Empty model: uniform point.
Point pss_sample(const GpModel& model, int d, const PssConfig& cfg, RngStream& rng);

/// Distances from x to the box boundary along +dir and -dir, found by
/// bisection with resolution 2^-bisection_steps; both returned parameters
/// are certified inside the box.
std::pair<double, double> chord_extents(const Vec& x, const Vec& dir, int bisection_steps);

}  // namespace stagger
