#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "resonant/random.hpp"
#include "resonant/reservoir.hpp"

namespace resonant {

/// Matern-5/2 ARD kernel with Gaussian observation noise.
struct GpHyper {
    Eigen::VectorXd lengthscales;
    double outputscale = 1.0;  // sigma_f^2
    double noise = 1e-4;       // sigma_n^2

    /// Packed as (log l_1 .. log l_d, log sigma_f^2, log sigma_n^2).
    Eigen::VectorXd to_log() const;
    static GpHyper from_log(const Eigen::VectorXd& theta);
};

struct GpFitOptions {
    int restarts = 5;
    int iterations = 60;
    double learning_rate = 0.1;
    double lengthscale_min = 0.005;
    double lengthscale_max = 4.0;
    double outputscale_min = 0.05;
    double outputscale_max = 20.0;
    double noise_min = 1e-6;
    double noise_max = 0.2;
    std::uint64_t seed = 0;
    /// Used as the first restart when present (same dimension required).
    std::optional<GpHyper> warm_start;
};

/// Matern-5/2 correlation as a function of the scaled distance r.
double matern52(double r);

/// Log marginal likelihood of `y` under the kernel; fills `grad` with the
/// derivative with respect to GpHyper::to_log() when non-null. Throws
/// IllConditioned if the covariance cannot be factorized even with jitter.
double log_marginal_likelihood(const RowMatrix& x, const Eigen::VectorXd& y, const GpHyper& hyper,
                               Eigen::VectorXd* grad = nullptr);

/// Exact GP regression. Targets are standardized internally; every query
/// returns values in the original units.
class GaussianProcess {
public:
    /// Fixed kernel, no hyper-parameter search.
    GaussianProcess(RowMatrix x, const Eigen::VectorXd& y, GpHyper hyper);

    /// Maximizes the marginal likelihood by projected Adam ascent in log
    /// space from `restarts` starts. Throws DegenerateData when all points
    /// coincide.
    static GaussianProcess fit(const RowMatrix& x, const Eigen::VectorXd& y, const GpFitOptions& opts = {});

    Eigen::VectorXd mean(const RowMatrix& xs) const;
    /// Latent-function variance (noise excluded), never negative.
    Eigen::VectorXd variance(const RowMatrix& xs) const;
    /// One joint draw of the latent function at every row of `xs`.
    Eigen::VectorXd sample(const RowMatrix& xs, Rng& rng) const;

    const GpHyper& hyper() const noexcept { return hyper_; }
    double log_likelihood() const noexcept { return lml_; }
    Eigen::Index size() const noexcept { return x_.rows(); }

private:
    Eigen::MatrixXd cross(const RowMatrix& xs) const;

    RowMatrix x_;
    GpHyper hyper_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
};

}  // namespace resonant
