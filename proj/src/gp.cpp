#include "staggerbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "staggerbo/domain.hpp"
#include "staggerbo/optimize.hpp"

namespace stagger {

namespace {

constexpr double kSqrt5 = 2.23606797749978969;

// Bounds for the log-space hyperparameter search.
constexpr double kLogLenLo = -4.605170185988091;   // ln 0.01
constexpr double kLogLenHi = 2.995732273553991;    // ln 20
constexpr double kLogOutLo = -4.605170185988091;   // ln 0.01
constexpr double kLogOutHi = 4.605170185988092;    // ln 100
constexpr double kLogNoiseLo = -13.815510557964274;  // ln 1e-6
constexpr double kLogNoiseHi = 0.0;                  // ln 1

double matern52(double r) {
    const double s = kSqrt5 * r;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

// d matern52 / dr = -(5r/3)(1 + sqrt5 r) exp(-sqrt5 r); callers fold in the
// chain-rule factors, which cancel the 1/r singularity.
double matern52_dfactor(double r) {
    // Returns (5/3)(1 + sqrt5 r) exp(-sqrt5 r), so that
    // d k / d x_k = -output_scale * dfactor * (x_k - x'_k) / l_k^2.
    return (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
}

Mat scaled_sq_dist(const PointSet& a, const PointSet& b, const Vec& lengthscales) {
    const Mat as = a.array().rowwise() / lengthscales.transpose().array();
    const Mat bs = b.array().rowwise() / lengthscales.transpose().array();
    const Vec an = as.rowwise().squaredNorm();
    const Vec bn = bs.rowwise().squaredNorm();
    Mat r2 = an.replicate(1, b.rows()) + bn.transpose().replicate(a.rows(), 1) - 2.0 * as * bs.transpose();
    return r2.cwiseMax(0.0);
}

void symmetrize_clamp_inplace(Mat& c) {
    const auto m = c.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double v = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = v;
            c(j, i) = v;
        }
        c(i, i) = std::max(c(i, i), 0.0);
    }
}

Mat eigen_clamp_factor(const Mat& cov) {
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    if (es.info() != Eigen::Success) throw GpError("eigendecomposition failed");
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

void check_unit_box(const PointSet& pts, const char* who) {
    if (!pts.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
    if (pts.size() > 0 && (pts.minCoeff() < -1e-9 || pts.maxCoeff() > 1.0 + 1e-9))
        throw std::invalid_argument(std::string(who) + ": point outside [0,1]^d");
}

struct LmlEval {
    bool ok = false;
    double value = -std::numeric_limits<double>::infinity();
    Vec grad;
};

// theta = [log lengthscales (d), log output_scale, (log noise_variance)]
LmlEval eval_lml(const PointSet& x, const Vec& y, const Vec& theta, bool learn_noise,
                 double fixed_noise) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    LmlEval out;

    Vec lengthscales = theta.head(d).array().exp();
    const double vf = std::exp(theta[d]);
    const double vn = learn_noise ? std::exp(theta[d + 1]) : fixed_noise;

    const Mat r = scaled_sq_dist(x, x, lengthscales).cwiseSqrt();
    const auto sr = (kSqrt5 * r).array();
    const Mat kf = vf * ((1.0 + sr + sr.square() / 3.0) * (-sr).exp()).matrix();

    Mat k = kf;
    k.diagonal().array() += vn;
    Eigen::LLT<Mat> llt(k);
    if (llt.info() != Eigen::Success) return out;

    const Vec alpha = llt.solve(y);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));
    out.value = -0.5 * y.dot(alpha) - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);

    // W = alpha alpha^T - K^-1; gradient of lml w.r.t. theta_j is
    // 0.5 tr(W dK/dtheta_j).
    Mat w = -llt.solve(Mat::Identity(n, n));
    w.noalias() += alpha * alpha.transpose();

    out.grad.resize(learn_noise ? d + 2 : d + 1);
    // W .* dfactor-weighted kernel envelope
    const Mat m =
        (w.array() * (vf * (5.0 / 3.0) * (1.0 + sr) * (-sr).exp())).matrix();
    const Vec rowsum = m.rowwise().sum();
    for (int kdim = 0; kdim < d; ++kdim) {
        const Vec c = x.col(kdim) / lengthscales[kdim];
        const Vec c2 = c.cwiseProduct(c);
        // sum_ij m_ij (c_i - c_j)^2 = 2 (rowsum . c2) - 2 c^T m c
        out.grad[kdim] = 0.5 * (2.0 * rowsum.dot(c2) - 2.0 * c.dot(m * c));
    }
    out.grad[d] = 0.5 * (w.array() * kf.array()).sum();
    if (learn_noise) out.grad[d + 1] = 0.5 * vn * w.trace();
    out.ok = true;
    return out;
}

Vec clamp_theta(Vec theta, int d, bool learn_noise) {
    for (int i = 0; i < d; ++i) theta[i] = std::clamp(theta[i], kLogLenLo, kLogLenHi);
    theta[d] = std::clamp(theta[d], kLogOutLo, kLogOutHi);
    if (learn_noise) theta[d + 1] = std::clamp(theta[d + 1], kLogNoiseLo, kLogNoiseHi);
    return theta;
}

std::pair<double, Vec> mean_and_grad(const GpModel& model, const Vec& x, bool with_grad) {
    const int d = model.dim();
    const double shift = model.y_shift();
    const double scale = model.y_scale();
    if (model.empty()) return {shift, Vec::Zero(d)};

    const auto& params = model.params();
    const auto& pts = model.data().points;
    const int n = model.size();
    const Vec& alpha = model.weights();

    double mean = 0.0;
    Vec grad = Vec::Zero(d);
    for (int i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double u = (x[k] - pts(i, k)) / params.lengthscales[k];
            r2 += u * u;
        }
        const double r = std::sqrt(r2);
        mean += alpha[i] * params.output_scale * matern52(r);
        if (with_grad) {
            const double f = alpha[i] * params.output_scale * matern52_dfactor(r);
            for (int k = 0; k < d; ++k)
                grad[k] -= f * (x[k] - pts(i, k)) /
                           (params.lengthscales[k] * params.lengthscales[k]);
        }
    }
    return {shift + scale * mean, scale * grad};
}

}  // namespace

Dataset::Dataset(PointSet x, Vec y) : points(std::move(x)), values(std::move(y)) {
    if (points.rows() != values.size())
        throw std::invalid_argument("Dataset: points/values length mismatch");
    check_unit_box(points, "Dataset");
    if (!values.allFinite()) throw std::invalid_argument("Dataset: non-finite value");
}

void Dataset::append(const PointSet& x, const Vec& y) {
    if (x.rows() != y.size()) throw std::invalid_argument("Dataset::append: length mismatch");
    if (x.cols() != points.cols()) throw std::invalid_argument("Dataset::append: dimension mismatch");
    check_unit_box(x, "Dataset::append");
    if (!y.allFinite()) throw std::invalid_argument("Dataset::append: non-finite value");
    const auto n = points.rows();
    points.conservativeResize(n + x.rows(), Eigen::NoChange);
    values.conservativeResize(n + y.size());
    points.bottomRows(x.rows()) = x;
    values.tail(y.size()) = y;
}

Mat kernel_matrix(const PointSet& a, const PointSet& b, const KernelParams& params) {
    if (a.cols() != b.cols()) throw std::invalid_argument("kernel_matrix: dimension mismatch");
    if (params.lengthscales.size() != a.cols())
        throw std::invalid_argument("kernel_matrix: lengthscale dimension mismatch");
    Mat s = scaled_sq_dist(a, b, params.lengthscales);
    s = kSqrt5 * s.cwiseSqrt();
    return params.output_scale *
           ((1.0 + s.array() + s.array().square() / 3.0) * (-s.array()).exp()).matrix();
}

Mat chol_spd(Mat k) {
    {
        Mat work = k;
        Eigen::LLT<Eigen::Ref<Mat>> llt(work);
        if (llt.info() == Eigen::Success) return work.triangularView<Eigen::Lower>();
    }
    for (double jitter = kNoiseFloor; jitter <= 1e-2 + 1e-15; jitter *= 10.0) {
        Mat work = k;
        work.diagonal().array() += jitter;
        Eigen::LLT<Eigen::Ref<Mat>> llt(work);
        if (llt.info() == Eigen::Success) return work.triangularView<Eigen::Lower>();
    }
    throw GpError("Cholesky failed after jitter escalation to 1e-2");
}

Mat psd_factor(Mat cov) {
    const auto m = cov.rows();
    if (m <= 64) return eigen_clamp_factor(cov);

    const double scale = std::max(cov.diagonal().mean(), std::numeric_limits<double>::min());
    {
        Mat work = cov;
        Eigen::LLT<Eigen::Ref<Mat>> llt(work);
        if (llt.info() == Eigen::Success) {
            work.triangularView<Eigen::StrictlyUpper>().setZero();
            return work;
        }
    }
    for (double jitter = 1e-12; jitter <= 1e-2 + 1e-15; jitter *= 100.0) {
        Mat work = cov;
        work.diagonal().array() += jitter * scale;
        Eigen::LLT<Eigen::Ref<Mat>> llt(work);
        if (llt.info() == Eigen::Success) {
            work.triangularView<Eigen::StrictlyUpper>().setZero();
            return work;
        }
    }
    if (m <= 2048) return eigen_clamp_factor(cov);
    throw GpError("covariance factorization failed after jitter escalation");
}

void GpModel::factorize() {
    const int n = size();
    if (n == 0) {
        chol_.resize(0, 0);
        alpha_.resize(0);
        lml_ = 0.0;
        return;
    }
    Mat k = kernel_matrix(data_.points, data_.points, params_);
    k.diagonal().array() += params_.noise_variance;
    chol_ = chol_spd(std::move(k));
    const Vec ynorm = (data_.values.array() - shift_) / scale_;
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(ynorm);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(chol_(i, i));
    const double quad = alpha_.squaredNorm();
    alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(alpha_);
    lml_ = -0.5 * quad - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Point GpModel::best_point() const {
    if (empty()) throw std::invalid_argument("best_point: empty model");
    Eigen::Index which = 0;
    data_.values.maxCoeff(&which);
    return data_.points.row(which).transpose();
}

double GpModel::best_value() const {
    if (empty()) throw std::invalid_argument("best_value: empty model");
    return data_.values.maxCoeff();
}

namespace {

// Canonical row order makes every model query independent of the order in
// which measurements were appended.
Dataset canonical_order(Dataset data) {
    std::vector<int> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), 0);
    const auto& pts = data.points;
    const auto& vals = data.values;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (int k = 0; k < pts.cols(); ++k) {
            if (pts(a, k) != pts(b, k)) return pts(a, k) < pts(b, k);
        }
        return vals[a] < vals[b];
    });
    Dataset out(data.dim());
    out.points.resize(pts.rows(), pts.cols());
    out.values.resize(vals.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.points.row(static_cast<Eigen::Index>(i)) = pts.row(order[i]);
        out.values[static_cast<Eigen::Index>(i)] = vals[order[i]];
    }
    return out;
}

}  // namespace

GpModel GpModel::with_observations(const PointSet& x, const Vec& y) const {
    GpModel out = *this;
    out.data_.append(x, y);
    out.data_ = canonical_order(std::move(out.data_));
    out.factorize();
    return out;
}

GpModel fit(const Dataset& data, const FitOptions& opts) {
    const int n = data.size();
    const int d = data.dim();
    const bool learn_noise = !opts.fixed_noise.has_value();
    const double fixed_noise =
        opts.fixed_noise ? std::max(*opts.fixed_noise, kNoiseFloor) : kNoiseFloor;

    GpModel model;
    model.data_ = canonical_order(data);
    model.params_.lengthscales = Vec::Constant(std::max(d, 1), 0.3);
    model.params_.output_scale = 1.0;
    model.params_.noise_variance = fixed_noise;
    if (n == 0) {
        model.factorize();
        return model;
    }

    model.shift_ = model.data_.values.mean();
    const double sd = std::sqrt((model.data_.values.array() - model.shift_).square().mean());
    model.scale_ = sd > 1e-12 ? sd : 1.0;

    if (n >= 2 && opts.iterations > 0) {
        const Vec ynorm = (model.data_.values.array() - model.shift_) / model.scale_;
        const int p = learn_noise ? d + 2 : d + 1;

        Vec default_start(p);
        default_start.head(d).setConstant(std::log(0.3));
        default_start[d] = 0.0;
        if (learn_noise) default_start[d + 1] = std::log(1e-4);

        RngStream rng(0x66697453ull, 0);  // fixed seed: fit is deterministic in the data
        Vec best_theta = default_start;
        double best_value = -std::numeric_limits<double>::infinity();

        const double len_hi = std::log(std::max(2.0, std::sqrt(static_cast<double>(d))));
        for (int s = 0; s < std::max(1, opts.restarts); ++s) {
            Vec theta(p);
            if (s == 0) {
                theta = default_start;
            } else {
                for (int i = 0; i < d; ++i)
                    theta[i] = std::log(0.05) + rng.uniform() * (len_hi - std::log(0.05));
                theta[d] = std::log(0.2) + rng.uniform() * (std::log(5.0) - std::log(0.2));
                if (learn_noise)
                    theta[d + 1] = std::log(1e-5) + rng.uniform() * (std::log(0.1) - std::log(1e-5));
            }
            theta = clamp_theta(std::move(theta), d, learn_noise);

            Vec m = Vec::Zero(p), v = Vec::Zero(p);
            const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
            for (int it = 1; it <= opts.iterations; ++it) {
                const LmlEval e =
                    eval_lml(model.data_.points, ynorm, theta, learn_noise, fixed_noise);
                if (!e.ok) break;
                if (e.value > best_value) {
                    best_value = e.value;
                    best_theta = theta;
                }
                if (e.grad.lpNorm<Eigen::Infinity>() < 1e-6) break;
                m = b1 * m + (1.0 - b1) * e.grad;
                v = b2 * v + (1.0 - b2) * e.grad.cwiseProduct(e.grad);
                const double c1 = 1.0 - std::pow(b1, it);
                const double c2 = 1.0 - std::pow(b2, it);
                const Vec step = (m / c1).array() / ((v / c2).array().sqrt() + eps);
                theta = clamp_theta(theta + lr * step, d, learn_noise);
            }
        }

        model.params_.lengthscales = best_theta.head(d).array().exp();
        model.params_.output_scale = std::exp(best_theta[d]);
        model.params_.noise_variance =
            learn_noise ? std::max(std::exp(best_theta[d + 1]), kNoiseFloor) : fixed_noise;
    }

    model.factorize();
    return model;
}

PosteriorGaussian posterior(const GpModel& model, const PointSet& query) {
    if (query.rows() == 0) throw std::invalid_argument("posterior: empty query");
    if (query.cols() != model.dim() && !model.empty())
        throw std::invalid_argument("posterior: dimension mismatch");
    check_unit_box(query, "posterior");

    const auto m = query.rows();
    PosteriorGaussian post;
    KernelParams params = model.params();
    if (model.empty() && params.lengthscales.size() != query.cols())
        params.lengthscales = Vec::Constant(query.cols(), 0.3);

    post.covariance = kernel_matrix(query, query, params);
    const double s2 = model.y_scale() * model.y_scale();
    if (model.empty()) {
        post.mean = Vec::Constant(m, model.y_shift());
        post.covariance *= s2;
        symmetrize_clamp_inplace(post.covariance);
        return post;
    }

    const Mat ks = kernel_matrix(model.data().points, query, params);
    const Mat v = model.chol_factor().triangularView<Eigen::Lower>().solve(ks);
    post.mean =
        (model.y_shift() + model.y_scale() * (ks.transpose() * model.weights()).array()).matrix();
    post.covariance.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), -1.0);
    post.covariance.triangularView<Eigen::StrictlyUpper>() = post.covariance.transpose();
    post.covariance *= s2;
    for (Eigen::Index i = 0; i < m; ++i)
        post.covariance(i, i) = std::max(post.covariance(i, i), 0.0);
    return post;
}

MeanVarGrad mean_var_grad(const GpModel& model, const Vec& x, bool with_grad) {
    const int d = static_cast<int>(x.size());
    MeanVarGrad out;
    out.dmean = Vec::Zero(d);
    out.dvar = Vec::Zero(d);
    const double s2 = model.y_scale() * model.y_scale();
    if (model.empty()) {
        out.mean = model.y_shift();
        out.var = model.params().output_scale * s2;
        return out;
    }
    if (d != model.dim()) throw std::invalid_argument("mean_var_grad: dimension mismatch");

    const auto& params = model.params();
    const auto& pts = model.data().points;
    const int n = model.size();

    Vec a(n);
    Mat g(n, d);  // row i: d k(x_i, x) / d x
    for (int i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double u = (x[k] - pts(i, k)) / params.lengthscales[k];
            r2 += u * u;
        }
        const double r = std::sqrt(r2);
        a[i] = params.output_scale * matern52(r);
        const double f = params.output_scale * matern52_dfactor(r);
        for (int k = 0; k < d; ++k)
            g(i, k) = -f * (x[k] - pts(i, k)) / (params.lengthscales[k] * params.lengthscales[k]);
    }

    const Vec w = model.chol_factor().triangularView<Eigen::Lower>().solve(a);
    const Vec q = model.chol_factor().transpose().triangularView<Eigen::Upper>().solve(w);
    out.mean = model.y_shift() + model.y_scale() * a.dot(model.weights());
    out.var = s2 * std::max(params.output_scale - w.squaredNorm(), 0.0);
    if (with_grad) {
        out.dmean = model.y_scale() * (g.transpose() * model.weights());
        out.dvar = -2.0 * s2 * (g.transpose() * q);
    }
    return out;
}

MvnSampler::MvnSampler(PosteriorGaussian post)
    : mean_(std::move(post.mean)), factor_(psd_factor(std::move(post.covariance))) {}

Vec MvnSampler::draw(RngStream& rng) const {
    Vec z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean_ + factor_ * z;
}

Vec joint_sample(const GpModel& model, const PointSet& query, RngStream& rng) {
    return MvnSampler(posterior(model, query)).draw(rng);
}

Vec conditional_variance(const GpModel& model, const PointSet& query, const PointSet& pending) {
    if (query.rows() == 0) throw std::invalid_argument("conditional_variance: empty query");
    const int d = static_cast<int>(query.cols());
    if (!model.empty() && d != model.dim())
        throw std::invalid_argument("conditional_variance: dimension mismatch");
    if (pending.rows() > 0 && pending.cols() != d)
        throw std::invalid_argument("conditional_variance: pending dimension mismatch");
    check_unit_box(query, "conditional_variance");
    check_unit_box(pending, "conditional_variance");

    KernelParams params = model.params();
    if (model.empty() && params.lengthscales.size() != d)
        params.lengthscales = Vec::Constant(d, 0.3);
    const double s2 = model.y_scale() * model.y_scale();

    const int n = model.size();
    const int p = static_cast<int>(pending.rows());
    if (n + p == 0) return Vec::Constant(query.rows(), params.output_scale * s2);

    PointSet all(n + p, d);
    if (n > 0) all.topRows(n) = model.data().points;
    if (p > 0) all.bottomRows(p) = pending;

    Mat k = kernel_matrix(all, all, params);
    k.diagonal().array() += params.noise_variance;
    const Mat chol = chol_spd(std::move(k));
    const Mat ks = kernel_matrix(all, query, params);
    const Mat w = chol.triangularView<Eigen::Lower>().solve(ks);

    Vec var(query.rows());
    for (Eigen::Index i = 0; i < query.rows(); ++i)
        var[i] = s2 * std::max(params.output_scale - w.col(i).squaredNorm(), 0.0);
    return var;
}

Point argmax_mean(const GpModel& model, int d, const SearchBudget& budget, RngStream& rng) {
    if (budget.starts < 1 || budget.steps < 0)
        throw std::invalid_argument("argmax_mean: invalid budget");
    if (!model.empty() && d != model.dim())
        throw std::invalid_argument("argmax_mean: dimension mismatch");
    if (model.empty()) return uniform_point(rng, d);

    PointSet starts(budget.starts, d);
    starts.row(0) = model.best_point().transpose();
    for (int s = 1; s < budget.starts; ++s) starts.row(s) = uniform_point(rng, d).transpose();

    const BoxObjective f = [&](const Vec& x) { return mean_and_grad(model, x, false).first; };
    const BoxGradient grad = [&](const Vec& x) { return mean_and_grad(model, x, true).second; };
    return multistart_ascend(f, grad, starts, budget.steps).x;
}

double log_marginal_likelihood(const Dataset& data, const KernelParams& params) {
    const int n = data.size();
    if (n == 0) return 0.0;
    const double shift = data.values.mean();
    const double sd = std::sqrt((data.values.array() - shift).square().mean());
    const double scale = sd > 1e-12 ? sd : 1.0;
    const Vec ynorm = (data.values.array() - shift) / scale;

    Mat k = kernel_matrix(data.points, data.points, params);
    k.diagonal().array() += params.noise_variance;
    const Mat chol = chol_spd(std::move(k));
    Vec w = chol.triangularView<Eigen::Lower>().solve(ynorm);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(chol(i, i));
    return -0.5 * w.squaredNorm() - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace stagger
