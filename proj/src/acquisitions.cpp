#include "staggerbo/acquisitions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "staggerbo/domain.hpp"
#include "staggerbo/optimize.hpp"

namespace stagger {

namespace {

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double expected_improvement(double mu, double sigma, double best) {
    if (sigma < 0.0) throw std::invalid_argument("expected_improvement: sigma must be >= 0");
    if (sigma == 0.0) return std::max(0.0, mu - best);
    const double z = (mu - best) / sigma;
    return std::max(0.0, (mu - best) * norm_cdf(z) + sigma * norm_pdf(z));
}

double ucb(double mu, double sigma, double beta) {
    if (sigma < 0.0) throw std::invalid_argument("ucb: sigma must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("ucb: beta must be >= 0");
    return mu + beta * sigma;
}

Point propose_arm(const AcqSpec& spec, const GpModel& model, int d, int round_index,
                  RngStream& rng) {
    if (d < 1) throw std::invalid_argument("propose_arm: dimension must be >= 1");
    switch (spec.kind) {
        case AcqKind::Random:
            return uniform_point(rng, d);
        case AcqKind::Sobol:
            return sobol_points(1, d, rng, round_index).row(0).transpose();
        default:
            break;
    }

    // First round with no data: a Sobol' point (space-filling start).
    if (model.empty()) return sobol_points(1, d, rng, 0).row(0).transpose();

    const double best = model.best_value();
    const auto acq_of = [&](const MeanVarGrad& mv) {
        const double sigma = std::sqrt(std::max(mv.var, 0.0));
        switch (spec.kind) {
            case AcqKind::Ei:
                return expected_improvement(mv.mean, sigma, best);
            case AcqKind::Ucb:
                return ucb(mv.mean, sigma, spec.beta);
            case AcqKind::Sr:
                return mv.mean;
            default:
                throw std::logic_error("propose_arm: unexpected kind");
        }
    };
    const BoxObjective f = [&](const Vec& x) { return acq_of(mean_var_grad(model, x, false)); };
    const BoxGradient grad = [&](const Vec& x) {
        const MeanVarGrad mv = mean_var_grad(model, x, true);
        const double sigma = std::sqrt(std::max(mv.var, 0.0));
        const Vec dsigma = sigma > 0.0 ? (mv.dvar / (2.0 * sigma)).eval() : Vec::Zero(d).eval();
        switch (spec.kind) {
            case AcqKind::Ei: {
                if (sigma == 0.0) return mv.mean > best ? mv.dmean : Vec::Zero(d).eval();
                const double z = (mv.mean - best) / sigma;
                // dEI = Phi(z) dmu + phi(z) dsigma
                return (norm_cdf(z) * mv.dmean + norm_pdf(z) * dsigma).eval();
            }
            case AcqKind::Ucb:
                return (mv.dmean + spec.beta * dsigma).eval();
            case AcqKind::Sr:
                return mv.dmean;
            default:
                throw std::logic_error("propose_arm: unexpected kind");
        }
    };

    PointSet starts(spec.budget.starts, d);
    starts.row(0) = model.best_point().transpose();
    for (int s = 1; s < spec.budget.starts; ++s)
        starts.row(s) = uniform_point(rng, d).transpose();
    return multistart_ascend(f, grad, starts, spec.budget.steps).x;
}

}  // namespace stagger
