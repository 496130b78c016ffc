#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resonant/bayesopt.hpp"
#include "resonant/bounds.hpp"
#include "resonant/config.hpp"
#include "resonant/errors.hpp"
#include "resonant/experiments.hpp"
#include "resonant/model_io.hpp"
#include "resonant/pendulum.hpp"

namespace py = pybind11;
using namespace resonant;
using nlohmann::json;

namespace {

ReservoirConfig make_config(const std::string& hps_json, bool feedback, std::uint64_t seed,
                            const std::string& activation, const std::string& output_activation,
                            std::optional<int> washout) {
    ReservoirConfig cfg;
    if (!hps_json.empty()) cfg.hps = hyperparams_from_json(json::parse(hps_json));
    cfg.feedback = feedback;
    cfg.seed = seed;
    cfg.activation = ActivationMix::parse(activation);
    cfg.output_activation = parse_activation(output_activation);
    cfg.washout = washout;
    cfg.validate();
    return cfg;
}

py::dict trajectory_dict(const TrajectoryData& t) {
    py::dict d;
    d["t"] = t.t;
    d["x"] = t.x;
    d["p"] = t.p;
    d["force"] = Eigen::VectorXd(t.force_series().col(0));
    d["dt"] = t.dt;
    return d;
}

py::dict forecast_dict(const ForecastReport& r) {
    py::dict d;
    d["train_nmse"] = r.train_nmse;
    d["test_nmse"] = r.test_nmse;
    d["train_rows"] = r.train_rows;
    d["truth"] = r.truth;
    d["prediction"] = r.prediction;
    d["fit_ms"] = r.fit_ms;
    d["predict_ms"] = r.predict_ms;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reservoir computing with trust-region Bayesian hyper-parameter search";

    auto base = py::register_exception<Error>(m, "ResonantError");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("output_dim", &TrainedModel::output_dim)
        .def_property_readonly("exogenous_dim", &TrainedModel::exogenous_dim)
        .def_property_readonly("n_nodes", [](const TrainedModel& t) { return t.weights.n_nodes(); })
        .def(
            "predict",
            [](const TrainedModel& t, std::optional<RowMatrix> inputs, std::optional<Eigen::Index> steps) {
                if (inputs) return predict(t, &*inputs, steps ? *steps : inputs->rows());
                if (!steps) throw InvalidArgument("steps is required without inputs");
                return predict(t, nullptr, *steps);
            },
            py::arg("inputs") = py::none(), py::arg("steps") = py::none())
        .def(
            "test",
            [](const TrainedModel& t, const RowMatrix& truth, std::optional<RowMatrix> inputs,
               const std::string& criterion) {
                auto r = test(t, inputs ? &*inputs : nullptr, truth, parse_criterion(criterion));
                return py::make_tuple(r.score, r.prediction);
            },
            py::arg("truth"), py::arg("inputs") = py::none(), py::arg("criterion") = "nmse")
        .def("to_json", [](const TrainedModel& t) { return to_json(t).dump(); })
        .def("save", [](const TrainedModel& t, const std::string& path) { save_model(path, t); })
        .def_static("load", [](const std::string& path) { return load_model(path); })
        .def_static("from_json", [](const std::string& s) { return model_from_json(json::parse(s)); });

    m.def(
        "fit",
        [](const RowMatrix& targets, std::optional<RowMatrix> inputs, const std::string& hps_json, bool feedback,
           std::uint64_t seed, const std::string& activation, const std::string& output_activation,
           std::optional<int> washout) {
            const auto cfg = make_config(hps_json, feedback, seed, activation, output_activation, washout);
            py::gil_scoped_release release;
            return fit_detailed(cfg, inputs ? &*inputs : nullptr, targets).model;
        },
        py::arg("targets"), py::arg("inputs") = py::none(), py::arg("hps_json"), py::arg("feedback") = false,
        py::arg("seed") = 0, py::arg("activation") = "tanh", py::arg("output_activation") = "identity",
        py::arg("washout") = py::none());

    m.def("nmse", &nmse, py::arg("truth"), py::arg("prediction"));
    m.def("reference_hyperparams", [] { return to_json(reference_hyperparams()).dump(); });

    m.def(
        "integrate",
        [](double x0, double p0, double dt, int steps, const std::string& family, double amplitude,
           double frequency, double noise, std::uint64_t noise_seed) {
            const auto clean = integrate(x0, p0, dt, steps, {parse_force_family(family), amplitude, frequency});
            auto d = trajectory_dict(add_noise(clean, noise, noise_seed));
            d["force"] = Eigen::VectorXd(clean.force_series().col(0));
            return d;
        },
        py::arg("x0"), py::arg("p0"), py::arg("dt"), py::arg("steps"), py::arg("family") = "sin",
        py::arg("amplitude") = 0.0, py::arg("frequency") = 0.0, py::arg("noise") = 0.0, py::arg("noise_seed") = 0);

    m.def(
        "detect_resonance",
        [](const Eigen::VectorXd& x, double threshold, double growth) {
            return detect_resonance(x, ResonanceCriteria{threshold, growth});
        },
        py::arg("x"), py::arg("position_threshold") = 3.141592653589793, py::arg("growth_factor") = 1.5);

    m.def("preset", [](const std::string& name, std::uint64_t seed) { return to_json(preset_by_name(name, seed)).dump(); },
          py::arg("name"), py::arg("seed") = 210);

    m.def(
        "run_forecast",
        [](const std::string& config_json) {
            const auto cfg = experiment_config_from_json(json::parse(config_json));
            ForecastReport r;
            {
                py::gil_scoped_release release;
                r = run_forecast(cfg);
            }
            return forecast_dict(r);
        },
        py::arg("config_json"));

    m.def(
        "run_noise_study",
        [](const std::string& config_json) {
            const auto cfg = experiment_config_from_json(json::parse(config_json));
            NoiseStudyReport r;
            {
                py::gil_scoped_release release;
                r = run_noise_study(cfg);
            }
            py::dict d;
            d["pure"] = forecast_dict(r.pure);
            d["parameter_aware"] = forecast_dict(r.parameter_aware);
            d["clean_pure_nmse"] = r.clean_pure_nmse;
            d["clean_parameter_aware_nmse"] = r.clean_parameter_aware_nmse;
            d["noisy_data_phase_error"] = r.noisy_data_phase_error;
            d["pure_phase_error"] = r.pure_phase_error;
            d["parameter_aware_phase_error"] = r.parameter_aware_phase_error;
            return d;
        },
        py::arg("config_json"));

    m.def(
        "run_heatmap",
        [](const std::string& config_json, int workers) {
            auto cfg = heatmap_config_from_json(json::parse(config_json));
            cfg.workers = workers;
            HeatmapResult r;
            {
                py::gil_scoped_release release;
                r = run_heatmap(cfg);
            }
            py::dict d;
            d["amplitudes"] = r.amplitudes;
            d["frequencies"] = r.frequencies;
            d["cells"] = r.to_series().data;
            d["median_nmse"] = r.median_nmse();
            return d;
        },
        py::arg("config_json"), py::arg("workers") = 0);

    m.def(
        "optimize",
        [](const RowMatrix& targets, std::optional<RowMatrix> inputs, const std::string& base_hps_json,
           bool feedback, std::uint64_t reservoir_seed, const std::string& activation, const std::string& bounds_toml,
           int n_trust_regions, int max_evals, int initial_samples, std::uint64_t seed, double validation_fraction) {
            ObjectiveConfig obj;
            obj.base = make_config(base_hps_json, feedback, reservoir_seed, activation, "identity", std::nullopt);
            obj.targets = targets;
            obj.inputs = std::move(inputs);
            obj.validation_fraction = validation_fraction;
            const BoundsSpec bounds = bounds_toml.empty() ? BoundsSpec::standard()
                                                          : BoundsSpec::from_toml_string(bounds_toml);
            OptimizeOptions opts;
            opts.n_trust_regions = n_trust_regions;
            opts.max_evals = max_evals;
            opts.initial_samples = initial_samples;
            opts.seed = seed;
            OptimizeResult r;
            {
                py::gil_scoped_release release;
                r = optimize(bounds, obj, opts);
            }
            py::dict d;
            d["best_hyperparams"] = to_json(bounds.decode(r.best.point)).dump();
            d["best_score"] = r.best.score;
            d["best_eval"] = r.best.eval_index;
            d["incumbent"] = r.incumbent;
            std::vector<double> scores;
            for (const auto& t : r.trials) scores.push_back(t.score);
            d["scores"] = scores;
            return d;
        },
        py::arg("targets"), py::arg("inputs") = py::none(), py::arg("base_hps_json") = "", py::arg("feedback") = false,
        py::arg("reservoir_seed") = 0, py::arg("activation") = "tanh", py::arg("bounds_toml") = "",
        py::arg("n_trust_regions") = 6, py::arg("max_evals") = 1200, py::arg("initial_samples") = 10,
        py::arg("seed") = 0, py::arg("validation_fraction") = 0.3);
}
