#pragma once

#include <optional>

#include "staggerbo/rng.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

/// Measured (x, y) pairs; points live in [0,1]^d, one per row.
struct Dataset {
    PointSet points;
    Vec values;

    explicit Dataset(int d = 0) : points(0, d), values(0) {}
    Dataset(PointSet x, Vec y);

    int dim() const { return static_cast<int>(points.cols()); }
    int size() const { return static_cast<int>(points.rows()); }
    bool empty() const { return size() == 0; }
    void append(const PointSet& x, const Vec& y);
};

/// Matern-5/2 ARD hyperparameters in normalized-output units.
/// output_scale is the prior variance; noise_variance is floored at
/// kNoiseFloor.
struct KernelParams {
    Vec lengthscales;
    double output_scale = 1.0;
    double noise_variance = 1e-6;
};

constexpr double kNoiseFloor = 1e-6;

struct PosteriorGaussian {
    Vec mean;        // objective units
    Mat covariance;  // objective units squared; symmetric PSD
};

struct FitOptions {
    int restarts = 4;     // 1 default start + (restarts-1) random log-space starts
    int iterations = 100;
    std::optional<double> fixed_noise;  // normalized units; skips noise learning
};

struct SearchBudget {
    int starts = 8;
    int steps = 64;
};

/// Gaussian-process surrogate. Immutable once fitted; all query methods
/// are safe to call from concurrent readers.
class GpModel {
  public:
    GpModel() = default;

    int dim() const { return data_.dim(); }
    int size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    const Dataset& data() const { return data_; }
    const KernelParams& params() const { return params_; }
    double y_shift() const { return shift_; }
    double y_scale() const { return scale_; }

    /// Fit objective value (marginal likelihood of the normalized data).
    double log_marginal_likelihood() const { return lml_; }

    /// Lower Cholesky factor of the noisy Gram matrix (normalized units).
    const Mat& chol_factor() const { return chol_; }
    /// Solved weights alpha = (K + noise I)^-1 y_norm.
    const Vec& weights() const { return alpha_; }

    /// Location of the highest measured value; throws if empty.
    Point best_point() const;
    double best_value() const;

    /// Same hyperparameters and normalization, dataset extended by (x, y);
    /// used for fantasized conditioning.
    GpModel with_observations(const PointSet& x, const Vec& y) const;

  private:
    friend GpModel fit(const Dataset&, const FitOptions&);

    void factorize();

    Dataset data_{};
    KernelParams params_{};
    double shift_ = 0.0;
    double scale_ = 1.0;
    double lml_ = 0.0;
    Mat chol_;
    Vec alpha_;
};

/// Maximum-marginal-likelihood fit with multi-start gradient ascent.
/// Empty data yields the prior model with default KernelParams.
/// Deterministic: invariant to the order of the rows of `data`.
GpModel fit(const Dataset& data, const FitOptions& opts = {});

/// Exact posterior at the query rows. Throws on empty query or dimension
/// mismatch.
PosteriorGaussian posterior(const GpModel& model, const PointSet& query);

/// Posterior mean and variance at one point, with gradients (objective
/// units). Used by the acquisition and mean maximizers.
struct MeanVarGrad {
    double mean = 0.0;
    double var = 0.0;
    Vec dmean;
    Vec dvar;
};
MeanVarGrad mean_var_grad(const GpModel& model, const Vec& x, bool with_grad = true);

/// One draw from the multivariate normal posterior at the query rows.
Vec joint_sample(const GpModel& model, const PointSet& query, RngStream& rng);

/// Factor a posterior once, then draw repeatedly.
class MvnSampler {
  public:
    explicit MvnSampler(PosteriorGaussian posterior);
    Vec draw(RngStream& rng) const;
    const Vec& mean() const { return mean_; }

  private:
    Vec mean_;
    Mat factor_;
};

/// Posterior variance at each query row after conditioning on hypothetical
/// observations at `pending` (values irrelevant). Empty pending returns the
/// plain posterior variance. Objective units squared.
Vec conditional_variance(const GpModel& model, const PointSet& query, const PointSet& pending);

/// Approximate maximizer of the posterior mean over [0,1]^d via
/// multi-start local ascent seeded at the best measured point.
Point argmax_mean(const GpModel& model, int d, const SearchBudget& budget, RngStream& rng);

/// Matern-5/2 ARD kernel matrix (normalized units, no noise).
Mat kernel_matrix(const PointSet& a, const PointSet& b, const KernelParams& params);

/// Marginal likelihood of `data` (normalized internally) under `params`;
/// exposed for diagnostics and cross-checks.
double log_marginal_likelihood(const Dataset& data, const KernelParams& params);

/// Cholesky with escalating diagonal jitter (1e-6 .. 1e-2 times the mean
/// diagonal); throws GpError when even the largest jitter fails.
Mat chol_spd(Mat k);

/// Factor a PSD matrix for sampling: exact eigenvalue clamping for small
/// matrices, jittered Cholesky for large ones.
Mat psd_factor(Mat cov);

}  // namespace stagger
