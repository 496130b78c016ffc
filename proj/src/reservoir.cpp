#include "resonant/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "resonant/errors.hpp"
#include "resonant/random.hpp"

namespace resonant {

void HyperParams::validate() const {
    if (n_nodes < 1) throw InvalidArgument("n_nodes must be >= 1");
    if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius))
        throw InvalidArgument("spectral_radius must be positive");
    if (!(connectivity > 0.0 && connectivity <= 1.0))
        throw InvalidArgument("connectivity must lie in (0, 1]");
    if (!(leaking_rate >= 0.0 && leaking_rate <= 1.0))
        throw InvalidArgument("leaking_rate must lie in [0, 1]");
    if (!std::isfinite(bias)) throw InvalidArgument("bias must be finite");
    if (!(regularization >= 0.0) || !std::isfinite(regularization))
        throw InvalidArgument("regularization must be >= 0");
}

namespace {

// Magnitude of the dominant root of z^2 - a z - b fitted to three iterates.
double two_term_estimate(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                         const Eigen::VectorXd& x2) {
    const double g00 = x0.squaredNorm();
    const double g01 = x0.dot(x1);
    const double g11 = x1.squaredNorm();
    const double r0 = x0.dot(x2);
    const double r1 = x1.dot(x2);
    const double det = g00 * g11 - g01 * g01;
    if (g11 == 0.0) return 0.0;
    if (det <= 1e-10 * g00 * g11) {
        // x1 parallel to x0: a single real dominant eigenvalue.
        return std::abs(r1 / g11);
    }
    // Normal equations for x2 ~ a x1 + b x0.
    const double a = (r1 * g00 - r0 * g01) / det;
    const double b = (r0 * g11 - r1 * g01) / det;
    const double disc = a * a + 4.0 * b;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return std::max(std::abs(0.5 * (a + s)), std::abs(0.5 * (a - s)));
    }
    return std::sqrt(-b);
}

}  // namespace

double dense_spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success) throw Error("dense eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralEstimate estimate_spectral_radius(const SparseRowMatrix& a,
                                          const PowerIterationOptions& options) {
    if (a.rows() != a.cols()) throw DimensionMismatch("spectral radius needs a square matrix");
    const auto n = a.rows();
    SpectralEstimate est;
    if (n == 0 || a.nonZeros() == 0) return est;

    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd x1 = a * x0;
    Eigen::VectorXd x2 = a * x1;
    double previous = -1.0;
    int stable_hits = 0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double estimate = two_term_estimate(x0, x1, x2);
        est.magnitude = estimate;
        est.iterations = it;
        if (estimate == 0.0) {
            est.converged = true;
            return est;
        }
        if (previous >= 0.0 &&
            std::abs(estimate - previous) <= options.relative_tolerance * estimate) {
            if (++stable_hits >= 3) {
                est.converged = true;
                return est;
            }
        } else {
            stable_hits = 0;
        }
        previous = estimate;
        const double scale = x1.norm();
        if (scale == 0.0) {
            est.magnitude = 0.0;
            est.converged = true;
            return est;
        }
        x0 = x1 / scale;
        x1 = x2 / scale;
        x2 = a * x1;
    }
    if (options.dense_fallback) {
        est.magnitude = dense_spectral_radius(Eigen::MatrixXd(a));
        est.converged = true;
    }
    return est;
}

ReservoirWeights::ReservoirWeights(Eigen::MatrixXd w_in, SparseRowMatrix w_res, Eigen::VectorXd b,
                                   std::vector<Activation> activations,
                                   HybridReluTanhParams hybrid)
    : w_in_(std::move(w_in)),
      w_res_(std::move(w_res)),
      b_(std::move(b)),
      activations_(std::move(activations)),
      hybrid_(hybrid) {
    const auto n = b_.size();
    if (n < 1) throw InvalidArgument("reservoir needs at least one node");
    if (w_in_.rows() != n) throw DimensionMismatch("w_in rows must equal n_nodes");
    if (w_res_.rows() != n || w_res_.cols() != n)
        throw DimensionMismatch("w_res must be n_nodes x n_nodes");
    if (static_cast<Eigen::Index>(activations_.size()) != n)
        throw DimensionMismatch("activation assignment length must equal n_nodes");
    hybrid_.validate();
    w_res_.makeCompressed();
}

ReservoirWeights ReservoirWeights::with_readout(Readout readout) const {
    if (readout.w_out.cols() != n_nodes())
        throw DimensionMismatch("w_out must have n_nodes columns");
    if (readout.c.size() != readout.w_out.rows())
        throw DimensionMismatch("readout bias length must equal the output dimension");
    ReservoirWeights copy = *this;
    copy.readout_ = std::move(readout);
    return copy;
}

void ReservoirWeights::step(const Eigen::VectorXd& u, double leaking_rate, Eigen::VectorXd& h,
                            Eigen::VectorXd& scratch) const {
    scratch.noalias() = w_res_ * h;
    scratch.noalias() += w_in_ * u;
    scratch += b_;
    apply_in_place(activations_, hybrid_, scratch);
    h = (1.0 - leaking_rate) * h + leaking_rate * scratch;
}

ReservoirWeights build_weights(const HyperParams& hps, int input_dim, std::uint64_t seed,
                               const BuildOptions& options) {
    hps.validate();
    if (input_dim < 1) throw InvalidArgument("input dimension must be >= 1");
    const int n = hps.n_nodes;
    const auto total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
    const auto nnz = static_cast<std::uint64_t>(
        std::llround(hps.connectivity * static_cast<double>(total)));
    if (nnz == 0)
        throw SingularSpectrum("connectivity * n_nodes^2 rounds to zero nonzeros; "
                               "increase connectivity or n_nodes");

    Rng rng(derive_seed(seed, {0}));
    // Partial Fisher-Yates picks nnz distinct positions.
    std::vector<std::uint32_t> positions(total);
    std::iota(positions.begin(), positions.end(), 0u);
    for (std::uint64_t i = 0; i < nnz; ++i) {
        const auto j = i + uniform_index(rng, total - i);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(nnz);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(nnz);
    for (auto pos : positions)
        triplets.emplace_back(static_cast<int>(pos / n), static_cast<int>(pos % n),
                              uniform(rng, -1.0, 1.0));
    SparseRowMatrix w_res(n, n);
    w_res.setFromTriplets(triplets.begin(), triplets.end());

    const auto spectrum = estimate_spectral_radius(w_res, options.power);
    const double max_entry = w_res.coeffs().cwiseAbs().maxCoeff();
    if (!(spectrum.magnitude > 1e-10 * max_entry))
        throw SingularSpectrum("reservoir adjacency has a zero dominant eigenvalue; "
                               "increase connectivity or n_nodes");
    w_res *= hps.spectral_radius / spectrum.magnitude;

    Rng in_rng(derive_seed(seed, {1}));
    Eigen::MatrixXd w_in(n, input_dim);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < input_dim; ++c)
            w_in(r, c) = options.input_scaling * uniform(in_rng, -1.0, 1.0);

    Eigen::VectorXd b = Eigen::VectorXd::Constant(n, hps.bias);
    auto activations = assign(options.mix, n, derive_seed(seed, {2}));
    return ReservoirWeights(std::move(w_in), std::move(w_res), std::move(b),
                            std::move(activations), options.hybrid);
}

HiddenStateTrace evolve_states(const ReservoirWeights& weights, const RowMatrix& inputs,
                               const Eigen::VectorXd& h0, double leaking_rate) {
    if (inputs.cols() != weights.input_dim())
        throw DimensionMismatch("input has " + std::to_string(inputs.cols()) +
                                " channels, reservoir expects " +
                                std::to_string(weights.input_dim()));
    if (h0.size() != weights.n_nodes())
        throw DimensionMismatch("initial state length must equal n_nodes");
    if (!h0.allFinite()) throw InvalidArgument("initial state must be finite");
    if (!(leaking_rate >= 0.0 && leaking_rate <= 1.0))
        throw InvalidArgument("leaking_rate must lie in [0, 1]");

    HiddenStateTrace trace;
    trace.initial_state = h0;
    trace.states.resize(inputs.rows(), weights.n_nodes());
    Eigen::VectorXd h = h0;
    Eigen::VectorXd scratch(weights.n_nodes());
    Eigen::VectorXd u(inputs.cols());
    for (Eigen::Index k = 0; k < inputs.rows(); ++k) {
        u = inputs.row(k).transpose();
        weights.step(u, leaking_rate, h, scratch);
        if (!h.allFinite())
            throw NonFiniteState("hidden state became non-finite at step " + std::to_string(k));
        trace.states.row(k) = h.transpose();
    }
    return trace;
}

}  // namespace resonant
