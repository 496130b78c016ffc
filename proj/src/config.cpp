#include "resonant/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "resonant/errors.hpp"
#include "resonant/model_io.hpp"
#include "toml.hpp"

namespace resonant {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + " must be a table");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(where + "." + key + " has the wrong type");
    }
}

void apply_reservoir(const json& j, ReservoirConfig& cfg) {
    const std::string where = "reservoir";
    check_keys(j,
               {"seed", "feedback", "activation", "output_activation", "theta_star", "input_scaling", "washout",
                "scaler_margin", "hyperparams"},
               where);
    read_into(j, "seed", cfg.seed, where);
    read_into(j, "feedback", cfg.feedback, where);
    read_into(j, "theta_star", cfg.hybrid.theta_star, where);
    read_into(j, "input_scaling", cfg.input_scaling, where);
    read_into(j, "scaler_margin", cfg.scaler_margin, where);
    if (j.contains("activation")) cfg.activation = activation_mix_from_json(j.at("activation"));
    if (j.contains("output_activation")) {
        if (!j.at("output_activation").is_string()) throw InvalidArgument("reservoir.output_activation must be a name");
        cfg.output_activation = parse_activation(j.at("output_activation").get<std::string>());
    }
    if (j.contains("washout")) {
        if (j.at("washout").is_null()) {
            cfg.washout.reset();
        } else {
            int w = 0;
            read_into(j, "washout", w, where);
            cfg.washout = w;
        }
    }
    if (j.contains("hyperparams")) {
        const json& h = j.at("hyperparams");
        check_keys(h, {"n_nodes", "spectral_radius", "connectivity", "leaking_rate", "bias", "regularization"},
                   "reservoir.hyperparams");
        json merged = to_json(cfg.hps);
        merged.update(h);
        cfg.hps = hyperparams_from_json(merged);
    }
}

void apply_experiment(const json& j, ExperimentConfig& cfg, bool allow_heatmap) {
    std::set<std::string> allowed{"preset", "parameter_aware", "train_fraction", "trajectory", "reservoir"};
    if (allow_heatmap) allowed.insert("heatmap");
    check_keys(j, allowed, "experiment config");
    if (j.contains("preset")) {
        if (!j.at("preset").is_string()) throw InvalidArgument("preset must be a name");
        cfg = preset_by_name(j.at("preset").get<std::string>());
    }
    read_into(j, "parameter_aware", cfg.parameter_aware, "experiment config");
    read_into(j, "train_fraction", cfg.train_fraction, "experiment config");
    if (j.contains("trajectory")) {
        const json& t = j.at("trajectory");
        const std::string where = "trajectory";
        check_keys(t, {"force", "amplitude", "frequency", "dt", "steps", "x0", "p0", "noise", "noise_seed"}, where);
        auto& ts = cfg.trajectory;
        if (t.contains("force")) {
            if (!t.at("force").is_string()) throw InvalidArgument("trajectory.force must be a name");
            ts.force.family = parse_force_family(t.at("force").get<std::string>());
        }
        read_into(t, "amplitude", ts.force.amplitude, where);
        read_into(t, "frequency", ts.force.frequency, where);
        read_into(t, "dt", ts.dt, where);
        read_into(t, "steps", ts.steps, where);
        read_into(t, "x0", ts.x0, where);
        read_into(t, "p0", ts.p0, where);
        read_into(t, "noise", ts.noise, where);
        read_into(t, "noise_seed", ts.noise_seed, where);
    }
    if (j.contains("reservoir")) apply_reservoir(j.at("reservoir"), cfg.reservoir);
    cfg.validate();
}

json toml_node_to_json(const toml::node& node) {
    if (auto* t = node.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_node_to_json(v);
        return out;
    }
    if (auto* a = node.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(toml_node_to_json(v));
        return out;
    }
    if (auto v = node.value_exact<std::int64_t>()) return *v;
    if (auto v = node.value_exact<double>()) return *v;
    if (auto v = node.value_exact<bool>()) return *v;
    if (auto v = node.value_exact<std::string>()) return *v;
    throw InvalidArgument("unsupported TOML value (dates and times are not accepted)");
}

}  // namespace

json to_json(const ReservoirConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["feedback"] = c.feedback;
    j["activation"] = to_json(c.activation);
    j["output_activation"] = std::string(to_string(c.output_activation));
    j["theta_star"] = c.hybrid.theta_star;
    j["input_scaling"] = c.input_scaling;
    j["washout"] = c.washout ? json(*c.washout) : json(nullptr);
    j["scaler_margin"] = c.scaler_margin;
    j["hyperparams"] = to_json(c.hps);
    return j;
}

json to_json(const ExperimentConfig& c) {
    const auto& ts = c.trajectory;
    json j;
    j["parameter_aware"] = c.parameter_aware;
    j["train_fraction"] = c.train_fraction;
    j["trajectory"] = {{"force", std::string(to_string(ts.force.family))},
                       {"amplitude", ts.force.amplitude},
                       {"frequency", ts.force.frequency},
                       {"dt", ts.dt},
                       {"steps", ts.steps},
                       {"x0", ts.x0},
                       {"p0", ts.p0},
                       {"noise", ts.noise},
                       {"noise_seed", ts.noise_seed}};
    j["reservoir"] = to_json(c.reservoir);
    return j;
}

json to_json(const HeatmapConfig& c) {
    json j = to_json(c.base);
    j["heatmap"] = {{"amplitudes", c.amplitudes},
                    {"frequencies", c.frequencies},
                    {"family", std::string(to_string(c.family))},
                    {"mode", std::string(to_string(c.mode))},
                    {"position_threshold", c.resonance.position_threshold},
                    {"growth_factor", c.resonance.growth_factor}};
    return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg = preset_pure_prediction();
    apply_experiment(j, cfg, false);
    return cfg;
}

HeatmapConfig heatmap_config_from_json(const json& j) {
    HeatmapConfig cfg;
    cfg.base = preset_pure_prediction();
    apply_experiment(j, cfg.base, true);
    if (j.contains("heatmap")) {
        const json& h = j.at("heatmap");
        const std::string where = "heatmap";
        check_keys(h, {"amplitudes", "frequencies", "family", "mode", "position_threshold", "growth_factor"}, where);
        read_into(h, "amplitudes", cfg.amplitudes, where);
        read_into(h, "frequencies", cfg.frequencies, where);
        if (h.contains("family")) {
            if (!h.at("family").is_string()) throw InvalidArgument("heatmap.family must be a name");
            cfg.family = parse_force_family(h.at("family").get<std::string>());
        }
        if (h.contains("mode")) {
            if (!h.at("mode").is_string()) throw InvalidArgument("heatmap.mode must be a name");
            cfg.mode = parse_heatmap_mode(h.at("mode").get<std::string>());
        }
        read_into(h, "position_threshold", cfg.resonance.position_threshold, where);
        read_into(h, "growth_factor", cfg.resonance.growth_factor, where);
    }
    cfg.validate();
    return cfg;
}

json toml_to_json(std::string_view text) {
    try {
        return toml_node_to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: " << e.description() << " at line " << e.source().begin.line;
        throw InvalidArgument(msg.str());
    }
}

json read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    if (path.extension() == ".json") {
        try {
            return json::parse(ss.str());
        } catch (const json::exception& e) {
            throw InvalidArgument("config '" + path.string() + "': " + e.what());
        }
    }
    return toml_to_json(ss.str());
}

ExperimentConfig preset_by_name(std::string_view name, std::uint64_t seed) {
    if (name == "pure_prediction") return preset_pure_prediction(seed);
    if (name == "parameter_aware") return preset_parameter_aware(seed);
    if (name == "multi_activation") return preset_multi_activation(seed);
    if (name == "noise_study") return preset_noise_study(seed);
    if (name == "reoptimization") return preset_reoptimization(seed);
    throw InvalidArgument("unknown preset '" + std::string(name) +
                          "' (pure_prediction, parameter_aware, multi_activation, noise_study, reoptimization)");
}

}  // namespace resonant
