#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "json.hpp"
#include "resonant/experiments.hpp"

namespace resonant {

/// Experiment documents share one layout in TOML and JSON:
///
///   preset = "pure_prediction"      # optional starting point
///   parameter_aware = true
///   train_fraction = 0.2
///   [trajectory]  force, amplitude, frequency, dt, steps, x0, p0, noise, noise_seed
///   [reservoir]   seed, feedback, activation, output_activation, theta_star,
///                 input_scaling, washout, scaler_margin
///   [reservoir.hyperparams]  n_nodes, spectral_radius, connectivity,
///                            leaking_rate, bias, regularization
///   [heatmap]     amplitudes, frequencies, family, mode,
///                 position_threshold, growth_factor
///
/// Every key is optional and overrides the preset (pure_prediction when
/// absent); unknown keys are rejected. to_json emits every key, so a stored
/// document reproduces the run exactly.

nlohmann::json to_json(const ReservoirConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const HeatmapConfig& config);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
HeatmapConfig heatmap_config_from_json(const nlohmann::json& j);

/// Converts a TOML document to the equivalent JSON tree.
nlohmann::json toml_to_json(std::string_view text);

/// Reads a .toml or .json experiment document.
nlohmann::json read_config_document(const std::filesystem::path& path);

/// Names accepted by `preset`: pure_prediction, parameter_aware,
/// multi_activation, noise_study, reoptimization.
ExperimentConfig preset_by_name(std::string_view name, std::uint64_t seed = 210);

}  // namespace resonant
