#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "resonant/activations.hpp"
#include "resonant/reservoir.hpp"
#include "resonant/scaler.hpp"

namespace resonant {

/// Everything that determines a fitted model besides the data.
struct ReservoirConfig {
    HyperParams hps;
    /// Teacher forcing: the previous target is appended to the inputs while
    /// fitting, and the previous prediction while forecasting.
    bool feedback = false;
    ActivationMix activation{Activation::tanh};
    Activation output_activation = Activation::identity;
    HybridReluTanhParams hybrid{};
    double input_scaling = 1.0;
    /// Leading rows dropped before the ridge solve; unset means min(100, K/10).
    std::optional<int> washout;
    /// Target scaler margin used when the output activation has a bounded range.
    double scaler_margin = 1e-3;
    std::uint64_t seed = 0;

    void validate() const;
};

int default_washout(Eigen::Index n_rows);

/// Immutable fitted reservoir. Safe to share between concurrent readers.
struct TrainedModel {
    ReservoirConfig config;
    ReservoirWeights weights;  // readout present
    /// Absent for pure prediction, where the input is a constant one.
    std::optional<AffineScaler> input_scaler;
    AffineScaler target_scaler;
    /// Hidden state after the last training step; forecasting continues from it.
    Eigen::VectorXd final_state;
    /// Last training target in scaled units, the first fed-back value.
    Eigen::VectorXd final_target;
    std::vector<std::string> target_names;

    int exogenous_dim() const { return input_scaler ? static_cast<int>(input_scaler->channels()) : 0; }
    int output_dim() const { return static_cast<int>(target_scaler.channels()); }
};

struct FitResult {
    TrainedModel model;
    /// Teacher-forced readout over every training row, original units.
    RowMatrix fitted;
    int washout = 0;
};

/// Regularized least squares for the readout. `design` holds one row per
/// sample with a trailing constant-one column whose coefficient is left
/// unpenalized. Returns the P x (N + 1) coefficient matrix. Throws
/// IllConditioned when the Gram matrix cannot be factorized reliably.
Eigen::MatrixXd ridge_solve(const RowMatrix& design, const RowMatrix& targets, double beta);

/// Input rows fed to the reservoir while fitting: scaled exogenous channels
/// (or a constant one) followed, with feedback, by the previous scaled target.
RowMatrix training_inputs(const RowMatrix& exogenous_scaled, const RowMatrix& targets_scaled,
                          bool feedback);

FitResult fit_detailed(const ReservoirConfig& config, const RowMatrix* inputs,
                       const RowMatrix& targets);

TrainedModel fit(const ReservoirConfig& config, const RowMatrix& targets);
TrainedModel fit(const ReservoirConfig& config, const RowMatrix& inputs, const RowMatrix& targets);

/// Autonomous forecast of a model trained without exogenous inputs.
RowMatrix predict(const TrainedModel& model, Eigen::Index n_steps);
/// Forecast driven by exogenous inputs, one row per step.
RowMatrix predict(const TrainedModel& model, const RowMatrix& inputs);
RowMatrix predict(const TrainedModel& model, const RowMatrix* inputs, Eigen::Index n_steps);

enum class Criterion { nmse, mse };

Criterion parse_criterion(std::string_view name);
std::string_view to_string(Criterion c);

/// sum (s - s_hat)^2 / sum s^2 over every channel and step.
double nmse(const RowMatrix& truth, const RowMatrix& prediction);
double mse(const RowMatrix& truth, const RowMatrix& prediction);
double score(Criterion criterion, const RowMatrix& truth, const RowMatrix& prediction);

struct TestResult {
    double score = 0.0;
    RowMatrix prediction;
};

/// Forecasts truth.rows() steps (the truth never reaches predict) and scores them.
TestResult test(const TrainedModel& model, const RowMatrix* inputs, const RowMatrix& truth,
                Criterion criterion = Criterion::nmse);

}  // namespace resonant
