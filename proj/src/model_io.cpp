#include "resonant/model_io.hpp"

#include <fstream>
#include <sstream>

#include "resonant/errors.hpp"

namespace resonant {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

template <typename Matrix>
json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd vector_from(const json& j, const char* name) {
    if (!j.is_array()) throw InvalidArgument(std::string("model field '") + name + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from(const json& j, const char* name, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw InvalidArgument(std::string("model field '") + name + "' has the wrong row count");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InvalidArgument(std::string("model field '") + name + "' has the wrong column count");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json scaler_json(const AffineScaler& s) {
    return {{"shift", vector_json(s.shift())}, {"scale", vector_json(s.scale())}};
}

AffineScaler scaler_from(const json& j) {
    return AffineScaler(vector_from(j.at("shift"), "shift"), vector_from(j.at("scale"), "scale"));
}

}  // namespace

json to_json(const HyperParams& hps) {
    return {{"n_nodes", hps.n_nodes},
            {"spectral_radius", hps.spectral_radius},
            {"connectivity", hps.connectivity},
            {"leaking_rate", hps.leaking_rate},
            {"bias", hps.bias},
            {"regularization", hps.regularization}};
}

HyperParams hyperparams_from_json(const json& j) {
    try {
        HyperParams hps;
        const auto& n = j.at("n_nodes");
        if (n.is_number_float()) {
            const double v = n.get<double>();
            if (v != std::round(v)) throw InvalidArgument("n_nodes must be an integer");
            hps.n_nodes = static_cast<int>(v);
        } else {
            hps.n_nodes = n.get<int>();
        }
        hps.spectral_radius = j.at("spectral_radius").get<double>();
        hps.connectivity = j.at("connectivity").get<double>();
        hps.leaking_rate = j.at("leaking_rate").get<double>();
        hps.bias = j.at("bias").get<double>();
        hps.regularization = j.at("regularization").get<double>();
        hps.validate();
        return hps;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed hyper-parameters: ") + e.what());
    }
}

json to_json(const ActivationMix& mix) {
    json j = json::object();
    for (const auto& [a, p] : mix.probabilities()) j[std::string(to_string(a))] = p;
    return j;
}

ActivationMix activation_mix_from_json(const json& j) {
    if (j.is_string()) return ActivationMix::parse(j.get<std::string>());
    if (!j.is_object()) throw InvalidArgument("activation mix must be an object or string");
    std::map<Activation, double> weights;
    for (const auto& [name, w] : j.items()) {
        if (!w.is_number()) throw InvalidArgument("activation weight for '" + name + "' must be a number");
        weights[parse_activation(name)] += w.get<double>();
    }
    return ActivationMix(weights);
}

json to_json(const TrainedModel& model) {
    const auto& w = model.weights;
    const auto& readout = w.readout();
    if (!readout) throw InvalidArgument("cannot serialize an unfitted model");
    const auto& cfg = model.config;

    json triplets = json::array();
    for (Eigen::Index r = 0; r < w.w_res().outerSize(); ++r)
        for (SparseRowMatrix::InnerIterator it(w.w_res(), r); it; ++it)
            triplets.push_back({it.row(), it.col(), it.value()});
    json assignment = json::array();
    for (auto a : w.activations()) assignment.push_back(std::string(to_string(a)));

    json j;
    j["version"] = kModelFormat;
    j["hyperparams"] = to_json(cfg.hps);
    j["seed"] = cfg.seed;
    j["feedback"] = cfg.feedback;
    j["activation"] = to_json(cfg.activation);
    j["output_activation"] = std::string(to_string(cfg.output_activation));
    j["theta_star"] = cfg.hybrid.theta_star;
    j["input_scaling"] = cfg.input_scaling;
    j["washout"] = cfg.washout ? json(*cfg.washout) : json(nullptr);
    j["scaler_margin"] = cfg.scaler_margin;
    j["n_nodes"] = w.n_nodes();
    j["input_dim"] = w.input_dim();
    j["exogenous_dim"] = model.exogenous_dim();
    j["output_dim"] = model.output_dim();
    j["input_scaler"] = model.input_scaler ? scaler_json(*model.input_scaler) : json(nullptr);
    j["target_scaler"] = scaler_json(model.target_scaler);
    j["target_names"] = model.target_names;
    j["w_in"] = matrix_json(w.w_in());
    j["b"] = vector_json(w.b());
    j["w_res"] = {{"rows", w.n_nodes()}, {"cols", w.n_nodes()}, {"triplets", std::move(triplets)}};
    j["activation_assignment"] = std::move(assignment);
    j["w_out"] = matrix_json(readout->w_out);
    j["c"] = vector_json(readout->c);
    j["final_state"] = vector_json(model.final_state);
    j["final_target"] = vector_json(model.final_target);
    return j;
}

TrainedModel model_from_json(const json& j) {
    try {
        if (j.value("version", std::string()) != kModelFormat)
            throw InvalidArgument(std::string("unsupported model version; expected ") + kModelFormat);
        ReservoirConfig cfg;
        cfg.hps = hyperparams_from_json(j.at("hyperparams"));
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.feedback = j.at("feedback").get<bool>();
        cfg.activation = activation_mix_from_json(j.at("activation"));
        cfg.output_activation = parse_activation(j.at("output_activation").get<std::string>());
        cfg.hybrid.theta_star = j.at("theta_star").get<double>();
        cfg.input_scaling = j.at("input_scaling").get<double>();
        if (!j.at("washout").is_null()) cfg.washout = j.at("washout").get<int>();
        cfg.scaler_margin = j.at("scaler_margin").get<double>();
        cfg.validate();

        const Eigen::Index n = j.at("n_nodes").get<int>();
        const Eigen::Index m = j.at("input_dim").get<int>();
        const Eigen::Index p = j.at("output_dim").get<int>();
        if (n != cfg.hps.n_nodes) throw InvalidArgument("n_nodes disagrees with hyperparams");
        if (n < 1 || m < 1 || p < 1) throw InvalidArgument("model dimensions must be positive");

        const auto& res = j.at("w_res");
        std::vector<Eigen::Triplet<double>> triplets;
        for (const auto& t : res.at("triplets")) {
            const auto r = t.at(0).get<Eigen::Index>();
            const auto c = t.at(1).get<Eigen::Index>();
            if (r < 0 || r >= n || c < 0 || c >= n) throw InvalidArgument("w_res triplet out of range");
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), t.at(2).get<double>());
        }
        SparseRowMatrix w_res(n, n);
        w_res.setFromTriplets(triplets.begin(), triplets.end());

        std::vector<Activation> assignment;
        for (const auto& a : j.at("activation_assignment"))
            assignment.push_back(parse_activation(a.get<std::string>()));

        ReservoirWeights weights(matrix_from(j.at("w_in"), "w_in", n, m), std::move(w_res),
                                 vector_from(j.at("b"), "b"), std::move(assignment), cfg.hybrid);
        Readout readout{matrix_from(j.at("w_out"), "w_out", p, n), vector_from(j.at("c"), "c")};

        std::optional<AffineScaler> input_scaler;
        if (!j.at("input_scaler").is_null()) input_scaler = scaler_from(j.at("input_scaler"));
        AffineScaler target_scaler = scaler_from(j.at("target_scaler"));
        if (target_scaler.channels() != p) throw InvalidArgument("target scaler width mismatch");
        const Eigen::Index exo = input_scaler ? input_scaler->channels() : 1;
        if (exo + (cfg.feedback ? p : 0) != m)
            throw InvalidArgument("input_dim disagrees with exogenous and feedback channels");

        TrainedModel model{cfg,
                           weights.with_readout(std::move(readout)),
                           std::move(input_scaler),
                           std::move(target_scaler),
                           vector_from(j.at("final_state"), "final_state"),
                           vector_from(j.at("final_target"), "final_target"),
                           j.value("target_names", std::vector<std::string>{})};
        if (model.final_state.size() != n || model.final_target.size() != p)
            throw InvalidArgument("final state or target has the wrong length");
        return model;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model, const json& run_config) {
    json j = to_json(model);
    if (!run_config.is_null()) j["run_config"] = run_config;
    write_json_file(path, j);
}

TrainedModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace resonant
