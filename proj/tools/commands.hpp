#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace resonant::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAllDiverged = 3;

struct GenerateOptions {
    std::string force = "sin";
    double amplitude = 0.5;
    double frequency = 0.2;
    double dt = 1.0 / (20.0 * 3.141592653589793);
    int steps = 12000;
    double x0 = 0.1;
    double p0 = 0.1;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string force_out;
    std::optional<double> split;
};

/// Reservoir settings shared by fit and optimize.
struct ReservoirFlags {
    std::string hps;  // JSON file
    bool feedback = false;
    std::uint64_t seed = 0;
    std::string activation = "tanh";
    std::string output_activation = "identity";
    std::optional<int> washout;
    double theta_star = 1.0;
    double input_scaling = 1.0;
};

struct FitOptions {
    ReservoirFlags reservoir;
    std::string target;
    std::string input;
    std::string out;
};

struct PredictOptions {
    std::string model;
    std::optional<long> steps;
    std::string input;
    std::string out;
};

struct TestOptions {
    std::string model;
    std::string target;
    std::string input;
    std::string criterion = "nmse";
    std::string out;
    std::string prediction_out;
};

struct OptimizeCliOptions {
    ReservoirFlags reservoir;
    std::string bounds;   // TOML; empty means the standard search space
    std::string config;   // experiment document supplying the data
    std::string target;
    std::string input;
    double validation_fraction = 0.3;
    std::string criterion = "nmse";
    int n_trust_regions = 6;
    int max_evals = 1200;
    int initial_samples = 10;
    int batch_size = 1;
    std::uint64_t seed = 0;
    std::string resume;
    bool timing = false;
    std::string out;
    std::string log;
};

struct HeatmapCliOptions {
    std::string config;
    std::optional<std::string> family;
    std::optional<std::string> mode;
    std::optional<std::string> amplitudes;
    std::optional<std::string> frequencies;
    std::optional<std::uint64_t> seed;
    std::string hps;
    std::string out;
    std::string svg;
};

struct PlotOptionsCli {
    std::string kind = "trajectory";
    std::string in;
    std::string out;
};

struct ExperimentCliOptions {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool timing = false;
};

int cmd_generate(const GenerateOptions& o);
int cmd_fit(const FitOptions& o);
int cmd_predict(const PredictOptions& o);
int cmd_test(const TestOptions& o);
int cmd_optimize(const OptimizeCliOptions& o);
int cmd_heatmap(const HeatmapCliOptions& o);
int cmd_plot(const PlotOptionsCli& o);
int cmd_forecast(const ExperimentCliOptions& o);
int cmd_noise_study(const ExperimentCliOptions& o);

}  // namespace resonant::cli
