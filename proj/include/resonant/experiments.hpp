#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "resonant/model.hpp"
#include "resonant/pendulum.hpp"
#include "resonant/series_io.hpp"

namespace resonant {

/// Ground-truth trajectory settings.
struct TrajectorySpec {
    ForceSpec force{ForceFamily::sin, 0.5, 0.2};
    double dt = 1.0 / (20.0 * 3.141592653589793);
    int steps = 12000;
    double x0 = 0.1;
    double p0 = 0.1;
    double noise = 0.0;
    std::uint64_t noise_seed = 0;

    void validate() const;
};

struct ExperimentConfig {
    TrajectorySpec trajectory;
    /// Leading fraction of the rows used for training; the rest is forecast.
    double train_fraction = 0.2;
    ReservoirConfig reservoir;
    /// Feed the force series as an exogenous input.
    bool parameter_aware = false;

    void validate() const;
    Eigen::Index train_rows() const;
};

struct ForecastReport {
    TrajectoryData clean;
    /// Trajectory the model was trained on (equals clean without noise).
    TrajectoryData observed;
    Eigen::Index train_rows = 0;
    double train_nmse = 0.0;
    double test_nmse = 0.0;
    /// Test rows only, (x, p) columns.
    RowMatrix truth;
    RowMatrix prediction;
    double fit_ms = 0.0;
    double predict_ms = 0.0;

    /// Columns t, x, p, x_pred, p_pred, x_residual, p_residual over the test rows.
    Series prediction_series() const;
};

/// Trains on the leading split of the observed trajectory, forecasts the
/// remainder and scores it against the clean trajectory.
ForecastReport run_forecast(const ExperimentConfig& config);

/// Mean over rows of `points` of the distance to the closest row of `orbit`.
double mean_nearest_distance(const RowMatrix& points, const RowMatrix& orbit);

struct NoiseStudyReport {
    ForecastReport pure;
    ForecastReport parameter_aware;
    double clean_pure_nmse = 0.0;
    double clean_parameter_aware_nmse = 0.0;
    /// Phase-space errors against the full clean orbit.
    double noisy_data_phase_error = 0.0;
    double pure_phase_error = 0.0;
    double parameter_aware_phase_error = 0.0;
};

/// Pure and parameter-aware forecasts trained on noisy data, plus the same
/// pair trained on clean data for reference.
NoiseStudyReport run_noise_study(const ExperimentConfig& config);

/// Reservoir hyper-parameters shared by the forcing studies.
HyperParams reference_hyperparams();

/// Ready-made configurations of the forcing studies. `seed` is the reservoir seed.
ExperimentConfig preset_pure_prediction(std::uint64_t seed = 210);
ExperimentConfig preset_parameter_aware(std::uint64_t seed = 210);
ExperimentConfig preset_multi_activation(std::uint64_t seed = 210);
ExperimentConfig preset_noise_study(std::uint64_t seed = 210);
/// Trajectory on which hyper-parameters are re-optimized (sincos forcing).
ExperimentConfig preset_reoptimization(std::uint64_t seed = 210);

enum class HeatmapMode { pure, parameter_aware };
std::string_view to_string(HeatmapMode m);
HeatmapMode parse_heatmap_mode(std::string_view name);

struct HeatmapConfig {
    std::vector<double> amplitudes{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> frequencies{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
    ForceFamily family = ForceFamily::sin;
    HeatmapMode mode = HeatmapMode::pure;
    /// Trajectory length/step, split and reservoir shared by every cell; the force is replaced per cell.
    ExperimentConfig base = preset_pure_prediction();
    ResonanceCriteria resonance;
    /// 0 means worker_count().
    int workers = 0;

    void validate() const;
};

struct HeatmapCell {
    double amplitude = 0.0;
    double frequency = 0.0;
    bool masked = false;  // resonant, not scored
    bool failed = false;  // forecast diverged; nmse holds the penalty
    double nmse = 0.0;
};

struct HeatmapResult {
    std::vector<double> amplitudes;
    std::vector<double> frequencies;
    ForceFamily family = ForceFamily::sin;
    HeatmapMode mode = HeatmapMode::pure;
    /// Row-major: amplitude index outer, frequency index inner.
    std::vector<HeatmapCell> cells;

    const HeatmapCell& at(std::size_t amp, std::size_t freq) const {
        return cells[amp * frequencies.size() + freq];
    }
    /// Median NMSE over unmasked cells (NaN when every cell is masked).
    double median_nmse() const;
    /// Matrix CSV rows: amplitude, frequency, masked, failed, nmse.
    Series to_series() const;
};

/// Cells are independent and run concurrently; results do not depend on
/// evaluation order.
HeatmapResult run_heatmap(const HeatmapConfig& config);

}  // namespace resonant
