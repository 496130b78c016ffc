#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "resonant/model.hpp"

namespace resonant {

inline constexpr const char* kModelFormat = "resonant-model/1";

/// Keys follow the familiar dictionary spelling: n_nodes, spectral_radius,
/// connectivity, leaking_rate, bias, regularization.
nlohmann::json to_json(const HyperParams& hps);
HyperParams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ActivationMix& mix);
ActivationMix activation_mix_from_json(const nlohmann::json& j);

/// Self-describing model document. The adjacency is stored as (row, col,
/// value) triplets, every other matrix densely, row by row. Doubles are
/// written in shortest round-trip form, so reloading is bit-exact.
nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

/// Writes the model document, embedding `run_config` when it is not null.
void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const nlohmann::json& run_config = nullptr);
TrainedModel load_model(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace resonant
