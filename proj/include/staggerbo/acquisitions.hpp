#pragma once

#include "staggerbo/gp.hpp"
#include "staggerbo/rng.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

enum class AcqKind { Ei, Ucb, Sr, Random, Sobol };

struct AcqSpec {
    AcqKind kind = AcqKind::Ei;
    double beta = 2.0;  // UCB only
    SearchBudget budget{};
};

/// Closed-form E[max(0, Y - best)] for Y ~ N(mu, sigma^2); sigma = 0
/// degenerates to max(0, mu - best).
double expected_improvement(double mu, double sigma, double best);

/// mu + beta * sigma. beta = 0 reduces to Simple Regret.
double ucb(double mu, double sigma, double beta);

/// Next arm for the acquisition baselines. ei/ucb/sr take the first
/// Sobol' point when no data exists, otherwise maximize the acquisition
/// over the unit box; `random` draws uniformly; `sobol` emits point
/// `round_index` of the scrambled sequence keyed by rng (rng is not
/// advanced, so repeated calls with the same stream continue one
/// sequence).
Point propose_arm(const AcqSpec& spec, const GpModel& model, int d, int round_index,
                  RngStream& rng);

}  // namespace stagger
