#include "resonant/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "resonant/errors.hpp"

namespace resonant {

namespace {

constexpr double kSqrt5 = 2.23606797749979;

double scaled_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j,
                       const Eigen::VectorXd& inv_ls) {
    return ((a.row(i) - b.row(j)).transpose().cwiseProduct(inv_ls)).norm();
}

Eigen::MatrixXd kernel_matrix(const RowMatrix& x, const GpHyper& h) {
    const auto n = x.rows();
    const Eigen::VectorXd inv_ls = h.lengthscales.cwiseInverse();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = h.outputscale;
        for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = h.outputscale * matern52(scaled_distance(x, i, x, j, inv_ls));
    }
    return k;
}

/// Cholesky of K + noise I, adding jitter on failure.
Eigen::LLT<Eigen::MatrixXd> factorize(Eigen::MatrixXd k, double noise, double outputscale) {
    k.diagonal().array() += noise;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    double jitter = 1e-10 * outputscale;
    for (int attempt = 0; llt.info() != Eigen::Success && attempt < 8; ++attempt) {
        k.diagonal().array() += jitter;
        llt.compute(k);
        jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success)
        throw IllConditioned("GP covariance is not positive definite", 0.0);
    return llt;
}

struct Standardized {
    Eigen::VectorXd y;
    double mean;
    double scale;
};

Standardized standardize(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    return {(y.array() - mean) / scale, mean, scale};
}

}  // namespace

double matern52(double r) {
    const double s = kSqrt5 * r;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::VectorXd GpHyper::to_log() const {
    Eigen::VectorXd t(lengthscales.size() + 2);
    t.head(lengthscales.size()) = lengthscales.array().log();
    t[lengthscales.size()] = std::log(outputscale);
    t[lengthscales.size() + 1] = std::log(noise);
    return t;
}

GpHyper GpHyper::from_log(const Eigen::VectorXd& theta) {
    const auto d = theta.size() - 2;
    GpHyper h;
    h.lengthscales = theta.head(d).array().exp();
    h.outputscale = std::exp(theta[d]);
    h.noise = std::exp(theta[d + 1]);
    return h;
}

double log_marginal_likelihood(const RowMatrix& x, const Eigen::VectorXd& y, const GpHyper& hyper,
                               Eigen::VectorXd* grad) {
    const auto n = x.rows();
    const auto d = x.cols();
    const Eigen::MatrixXd k = kernel_matrix(x, hyper);
    const auto llt = factorize(k, hyper.noise, hyper.outputscale);
    const Eigen::VectorXd alpha = llt.solve(y);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double lml = -0.5 * y.dot(alpha) - 0.5 * log_det -
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!grad) return lml;

    // d lml / d theta = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta)
    const Eigen::MatrixXd w = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    grad->resize(d + 2);
    const Eigen::VectorXd inv_ls = hyper.lengthscales.cwiseInverse();
    Eigen::VectorXd g_ls = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::VectorXd delta = (x.row(i) - x.row(j)).transpose().cwiseProduct(inv_ls);
            const double r = delta.norm();
            const double s = kSqrt5 * r;
            // dk/dlog l_m = sf2 * 5/3 (1 + sqrt5 r) exp(-sqrt5 r) delta_m^2; symmetric pair counted twice.
            const double common = hyper.outputscale * (5.0 / 3.0) * (1.0 + s) * std::exp(-s);
            g_ls += (2.0 * w(i, j) * common) * delta.cwiseAbs2();
        }
    grad->head(d) = 0.5 * g_ls;
    (*grad)[d] = 0.5 * (w.cwiseProduct(k)).sum();
    (*grad)[d + 1] = 0.5 * hyper.noise * w.trace();
    return lml;
}

GaussianProcess::GaussianProcess(RowMatrix x, const Eigen::VectorXd& y, GpHyper hyper)
    : x_(std::move(x)), hyper_(std::move(hyper)) {
    if (x_.rows() != y.size()) throw DimensionMismatch("GP points and scores differ in count");
    if (x_.rows() < 1) throw DegenerateData("GP needs at least one point");
    if (hyper_.lengthscales.size() != x_.cols())
        throw DimensionMismatch("one lengthscale per input dimension is required");
    const auto s = standardize(y);
    y_mean_ = s.mean;
    y_scale_ = s.scale;
    chol_ = factorize(kernel_matrix(x_, hyper_), hyper_.noise, hyper_.outputscale);
    alpha_ = chol_.solve(s.y);
    lml_ = log_marginal_likelihood(x_, s.y, hyper_);
}

GaussianProcess GaussianProcess::fit(const RowMatrix& x, const Eigen::VectorXd& y, const GpFitOptions& opts) {
    if (x.rows() != y.size()) throw DimensionMismatch("GP points and scores differ in count");
    bool distinct = false;
    for (Eigen::Index i = 1; i < x.rows() && !distinct; ++i) distinct = x.row(i) != x.row(0);
    if (!distinct) throw DegenerateData("GP needs at least two distinct points");

    const auto d = x.cols();
    const Eigen::VectorXd ys = standardize(y).y;
    Eigen::VectorXd lo(d + 2), hi(d + 2);
    lo.head(d).setConstant(std::log(opts.lengthscale_min));
    hi.head(d).setConstant(std::log(opts.lengthscale_max));
    lo[d] = std::log(opts.outputscale_min);
    hi[d] = std::log(opts.outputscale_max);
    lo[d + 1] = std::log(opts.noise_min);
    hi[d + 1] = std::log(opts.noise_max);

    Rng rng(opts.seed);
    Eigen::VectorXd best_theta;
    double best = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
        Eigen::VectorXd theta(d + 2);
        if (restart == 0 && opts.warm_start && opts.warm_start->lengthscales.size() == d) {
            theta = opts.warm_start->to_log();
        } else if (restart == 0) {
            theta.head(d).setConstant(std::log(0.5));
            theta[d] = 0.0;
            theta[d + 1] = std::log(1e-3);
        } else {
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = uniform(rng, lo[i], hi[i]);
        }
        theta = theta.cwiseMax(lo).cwiseMin(hi);

        // Adam ascent, projected onto the box after every step.
        Eigen::VectorXd m = Eigen::VectorXd::Zero(d + 2), v = Eigen::VectorXd::Zero(d + 2), g;
        const double b1 = 0.9, b2 = 0.999;
        for (int it = 1; it <= opts.iterations; ++it) {
            double value;
            try {
                value = log_marginal_likelihood(x, ys, GpHyper::from_log(theta), &g);
            } catch (const IllConditioned&) {
                break;
            }
            if (value > best) {
                best = value;
                best_theta = theta;
            }
            m = b1 * m + (1 - b1) * g;
            v = b2 * v + (1 - b2) * g.cwiseAbs2();
            const Eigen::VectorXd mhat = m / (1 - std::pow(b1, it));
            const Eigen::VectorXd vhat = v / (1 - std::pow(b2, it));
            theta += opts.learning_rate * mhat.cwiseQuotient((vhat.array().sqrt() + 1e-8).matrix());
            theta = theta.cwiseMax(lo).cwiseMin(hi);
        }
        try {
            const double value = log_marginal_likelihood(x, ys, GpHyper::from_log(theta));
            if (value > best) {
                best = value;
                best_theta = theta;
            }
        } catch (const IllConditioned&) {
        }
    }
    if (best_theta.size() == 0) throw IllConditioned("GP fit failed for every restart", 0.0);
    return GaussianProcess(x, y, GpHyper::from_log(best_theta));
}

Eigen::MatrixXd GaussianProcess::cross(const RowMatrix& xs) const {
    const Eigen::VectorXd inv_ls = hyper_.lengthscales.cwiseInverse();
    Eigen::MatrixXd k(x_.rows(), xs.rows());
    for (Eigen::Index j = 0; j < xs.rows(); ++j)
        for (Eigen::Index i = 0; i < x_.rows(); ++i)
            k(i, j) = hyper_.outputscale * matern52(scaled_distance(x_, i, xs, j, inv_ls));
    return k;
}

Eigen::VectorXd GaussianProcess::mean(const RowMatrix& xs) const {
    if (xs.cols() != x_.cols()) throw DimensionMismatch("query dimension differs from the GP inputs");
    return ((cross(xs).transpose() * alpha_).array() * y_scale_ + y_mean_).matrix();
}

Eigen::VectorXd GaussianProcess::variance(const RowMatrix& xs) const {
    if (xs.cols() != x_.cols()) throw DimensionMismatch("query dimension differs from the GP inputs");
    const Eigen::MatrixXd v = chol_.matrixL().solve(cross(xs));
    Eigen::VectorXd var = (hyper_.outputscale - v.colwise().squaredNorm().array()).matrix();
    return (var.array().max(0.0) * y_scale_ * y_scale_).matrix();
}

Eigen::VectorXd GaussianProcess::sample(const RowMatrix& xs, Rng& rng) const {
    if (xs.cols() != x_.cols()) throw DimensionMismatch("query dimension differs from the GP inputs");
    const auto m = xs.rows();
    const Eigen::MatrixXd kx = cross(xs);
    const Eigen::MatrixXd v = chol_.matrixL().solve(kx);
    Eigen::MatrixXd cov = kernel_matrix(xs, hyper_) - v.transpose() * v;
    const auto llt = factorize(std::move(cov), 1e-9 * hyper_.outputscale, hyper_.outputscale);
    Eigen::VectorXd z(m);
    for (auto& e : z) e = standard_normal(rng);
    const Eigen::VectorXd f = kx.transpose() * alpha_ + llt.matrixL() * z;
    return (f.array() * y_scale_ + y_mean_).matrix();
}

}  // namespace resonant
