#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "resonant/activations.hpp"

namespace resonant {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// The six tunable numbers governing reservoir architecture and the readout.
struct HyperParams {
    int n_nodes = 100;
    double spectral_radius = 0.9;
    /// Fraction of nonzero adjacency entries (1 - sparsity), in (0, 1].
    double connectivity = 0.1;
    double leaking_rate = 1.0;
    /// Scalar replicated into the input-layer bias vector.
    double bias = 0.0;
    /// Ridge coefficient.
    double regularization = 1e-6;

    /// Throws InvalidArgument on any violated range.
    void validate() const;

    bool operator==(const HyperParams&) const = default;
};

/// Dominant-eigenvalue magnitude estimate of a square sparse matrix.
struct SpectralEstimate {
    double magnitude = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct PowerIterationOptions {
    int max_iterations = 1000;
    double relative_tolerance = 1e-6;
    /// Fall back to a dense eigensolver when power iteration fails to converge.
    bool dense_fallback = true;
};

/// Power iteration from the start vector 1/sqrt(N). Each step fits the
/// two-term recurrence x_{k+2} = a x_{k+1} + b x_k over the iterates, whose
/// characteristic roots resolve complex-conjugate dominant pairs.
SpectralEstimate estimate_spectral_radius(const SparseRowMatrix& a,
                                          const PowerIterationOptions& options = {});

/// Largest eigenvalue magnitude by full dense eigendecomposition.
double dense_spectral_radius(const Eigen::MatrixXd& a);

/// Trained linear readout: prediction = w_out * h + c (w_out stored P x N).
struct Readout {
    Eigen::MatrixXd w_out;
    Eigen::VectorXd c;
};

/// Frozen random reservoir. The input, adjacency and bias matrices never
/// change after construction; the readout is attached by fitting.
class ReservoirWeights {
public:
    ReservoirWeights(Eigen::MatrixXd w_in, SparseRowMatrix w_res, Eigen::VectorXd b,
                     std::vector<Activation> activations, HybridReluTanhParams hybrid = {});

    int n_nodes() const noexcept { return static_cast<int>(b_.size()); }
    int input_dim() const noexcept { return static_cast<int>(w_in_.cols()); }

    const Eigen::MatrixXd& w_in() const noexcept { return w_in_; }
    const SparseRowMatrix& w_res() const noexcept { return w_res_; }
    const Eigen::VectorXd& b() const noexcept { return b_; }
    const std::vector<Activation>& activations() const noexcept { return activations_; }
    const HybridReluTanhParams& hybrid() const noexcept { return hybrid_; }

    const std::optional<Readout>& readout() const noexcept { return readout_; }
    ReservoirWeights with_readout(Readout readout) const;

    /// One leaky update: (1-alpha) h + alpha f(W_res h + W_in u + b).
    void step(const Eigen::VectorXd& u, double leaking_rate, Eigen::VectorXd& h,
              Eigen::VectorXd& scratch) const;

private:
    Eigen::MatrixXd w_in_;
    SparseRowMatrix w_res_;
    Eigen::VectorXd b_;
    std::vector<Activation> activations_;
    HybridReluTanhParams hybrid_;
    std::optional<Readout> readout_;
};

struct BuildOptions {
    ActivationMix mix{Activation::tanh};
    HybridReluTanhParams hybrid{};
    /// Multiplier on the uniform(-1, 1) input weights.
    double input_scaling = 1.0;
    PowerIterationOptions power{};
};

/// Draws round(connectivity * N^2) adjacency entries uniform(-1, 1) at
/// distinct positions, rescales to the requested spectral radius, draws
/// input weights uniform(-1, 1) and assigns node activations. Deterministic
/// in (hps, input_dim, seed, options). Throws SingularSpectrum when the
/// adjacency has no nonzero eigenvalue.
ReservoirWeights build_weights(const HyperParams& hps, int input_dim, std::uint64_t seed,
                               const BuildOptions& options = {});

struct HiddenStateTrace {
    /// Row k is h_{k+1}; the initial state is kept separately.
    RowMatrix states;
    Eigen::VectorXd initial_state;
    int washout = 0;
};

/// Runs the leaky recurrence over every input row. Throws NonFiniteState if a
/// state entry leaves the finite range and DimensionMismatch on shape errors.
HiddenStateTrace evolve_states(const ReservoirWeights& weights, const RowMatrix& inputs,
                               const Eigen::VectorXd& h0, double leaking_rate);

}  // namespace resonant
