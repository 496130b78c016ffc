#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "resonant/bayesopt.hpp"
#include "resonant/bounds.hpp"
#include "resonant/config.hpp"
#include "resonant/errors.hpp"
#include "resonant/experiments.hpp"
#include "resonant/model_io.hpp"
#include "resonant/series_io.hpp"
#include "resonant/svg.hpp"

namespace resonant::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

json run_config(const char* command, json settings) {
    return {{"tool", "resonant"}, {"version", kVersion}, {"command", command}, {"settings", std::move(settings)}};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

/// CSV plus a "<file>.json" sidecar holding the producing run configuration.
void write_series(const fs::path& path, const Series& s, const json& rc, json extra = json::object()) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_csv(path, s);
    extra["run_config"] = rc;
    write_json_file(sidecar_path(path), extra);
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_json_file(path, j);
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    return p.replace_extension(suffix + path.extension().string());
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::logic_error&) {
            throw InvalidArgument(std::string("cannot parse ") + what + " entry '" + cell + "'");
        }
    }
    if (out.empty()) throw InvalidArgument(std::string(what) + " list is empty");
    return out;
}

json reservoir_settings(const ReservoirFlags& f) {
    return {{"hps", f.hps},
            {"feedback", f.feedback},
            {"seed", f.seed},
            {"activation", f.activation},
            {"output_activation", f.output_activation},
            {"washout", f.washout ? json(*f.washout) : json(nullptr)},
            {"theta_star", f.theta_star},
            {"input_scaling", f.input_scaling}};
}

ReservoirConfig reservoir_from_flags(const ReservoirFlags& f, bool require_hps) {
    ReservoirConfig cfg;
    if (!f.hps.empty()) cfg.hps = hyperparams_from_json(read_json_file(f.hps));
    else if (require_hps) throw InvalidArgument("--hps is required");
    cfg.feedback = f.feedback;
    cfg.seed = f.seed;
    cfg.activation = ActivationMix::parse(f.activation);
    cfg.output_activation = parse_activation(f.output_activation);
    cfg.washout = f.washout;
    cfg.hybrid.theta_star = f.theta_star;
    cfg.input_scaling = f.input_scaling;
    cfg.validate();
    return cfg;
}

Series load_values(const std::string& path) {
    if (!fs::exists(path)) throw InvalidArgument("file '" + path + "' does not exist");
    return value_columns(read_csv(path));
}

std::optional<RowMatrix> load_inputs(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return load_values(path).data;
}

/// Columns [t], name, name_pred, name_residual for each target channel.
Series comparison_series(const Series& truth_file, const std::vector<std::string>& names, const RowMatrix& truth,
                         const RowMatrix& pred) {
    Series s;
    const int t = truth_file.find("t");
    const Eigen::Index extra = t >= 0 ? 1 : 0;
    const auto p = truth.cols();
    s.data.resize(truth.rows(), extra + 3 * p);
    if (t >= 0) {
        s.columns.push_back("t");
        s.data.col(0) = truth_file.data.col(t);
    }
    for (Eigen::Index c = 0; c < p; ++c) s.columns.push_back(names[static_cast<std::size_t>(c)]);
    for (Eigen::Index c = 0; c < p; ++c) s.columns.push_back(names[static_cast<std::size_t>(c)] + "_pred");
    for (Eigen::Index c = 0; c < p; ++c) s.columns.push_back(names[static_cast<std::size_t>(c)] + "_residual");
    s.data.middleCols(extra, p) = truth;
    s.data.middleCols(extra + p, p) = pred;
    s.data.middleCols(extra + 2 * p, p) = truth - pred;
    return s;
}

std::vector<std::string> channel_names(const TrainedModel& m) {
    if (static_cast<int>(m.target_names.size()) == m.output_dim()) return m.target_names;
    std::vector<std::string> names;
    for (int i = 0; i < m.output_dim(); ++i) names.push_back("y" + std::to_string(i));
    return names;
}

ExperimentConfig load_experiment(const ExperimentCliOptions& o, const char* default_preset) {
    ExperimentConfig ec;
    if (!o.config.empty()) {
        if (!o.preset.empty()) throw InvalidArgument("use either --config or --preset");
        ec = experiment_config_from_json(read_config_document(o.config));
    } else {
        ec = preset_by_name(o.preset.empty() ? default_preset : o.preset);
    }
    if (o.seed) ec.reservoir.seed = *o.seed;
    ec.validate();
    return ec;
}

void write_forecast_plots(const fs::path& dir, const Series& s) {
    write_text(dir / "trajectory.svg", prediction_plot(s, PlotKind::trajectory));
    write_text(dir / "residual.svg", prediction_plot(s, PlotKind::residual));
    write_text(dir / "phase.svg", prediction_plot(s, PlotKind::phase));
}

/// Settings that must match for a trial log to be resumed. File names may
/// change (the data fingerprint covers contents) and the budget may grow.
json resume_identity(json settings) {
    for (const char* k : {"resume", "out", "log", "timing", "max_evals", "target", "input", "config", "bounds"})
        settings.erase(k);
    if (settings.contains("reservoir")) settings["reservoir"].erase("hps");
    return settings;
}

/// FNV-1a over the raw bytes of the objective data.
std::string fingerprint(const ObjectiveConfig& obj) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](const RowMatrix& m) {
        const auto rows = static_cast<std::uint64_t>(m.rows()), cols = static_cast<std::uint64_t>(m.cols());
        for (std::uint64_t v : {rows, cols})
            for (int b = 0; b < 8; ++b) h = (h ^ ((v >> (8 * b)) & 0xff)) * 1099511628211ull;
        const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
        for (std::size_t i = 0; i < static_cast<std::size_t>(m.size()) * sizeof(double); ++i)
            h = (h ^ bytes[i]) * 1099511628211ull;
    };
    feed(obj.targets);
    if (obj.inputs) feed(*obj.inputs);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

int cmd_generate(const GenerateOptions& o) {
    const json rc = run_config("generate-data", {{"force", o.force},
                                                 {"amplitude", o.amplitude},
                                                 {"frequency", o.frequency},
                                                 {"dt", o.dt},
                                                 {"steps", o.steps},
                                                 {"x0", o.x0},
                                                 {"p0", o.p0},
                                                 {"noise", o.noise},
                                                 {"seed", o.seed},
                                                 {"out", o.out},
                                                 {"force_out", o.force_out},
                                                 {"split", opt(o.split)}});
    TrajectorySpec spec;
    spec.force = {parse_force_family(o.force), o.amplitude, o.frequency};
    spec.dt = o.dt;
    spec.steps = o.steps;
    spec.x0 = o.x0;
    spec.p0 = o.p0;
    spec.noise = o.noise;
    spec.noise_seed = o.seed;
    spec.validate();
    Eigen::Index n_train = 0;
    if (o.split) {
        if (!(*o.split > 0.0 && *o.split < 1.0)) throw InvalidArgument("--split must lie in (0, 1)");
        n_train = static_cast<Eigen::Index>(std::llround(*o.split * o.steps));
        if (n_train < 1 || n_train >= o.steps) throw InvalidArgument("--split leaves no training or test rows");
    }

    const auto clean = integrate(spec.x0, spec.p0, spec.dt, spec.steps, spec.force);
    const auto traj = add_noise(clean, spec.noise, spec.noise_seed);
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    write_trajectory(o.out, traj, rc);

    Series full{{"t", "x", "p"}, RowMatrix(traj.size(), 3)};
    full.data.col(0) = traj.t;
    full.data.col(1) = traj.x;
    full.data.col(2) = traj.p;
    Series force{{"t", "f"}, RowMatrix(traj.size(), 2)};
    force.data.col(0) = traj.t;
    force.data.col(1) = clean.force_series().col(0);
    if (!o.force_out.empty()) write_series(o.force_out, force, rc);
    if (o.split) {
        const auto n = full.rows();
        write_series(with_suffix(o.out, ".train"), full.slice_rows(0, n_train), rc, {{"rows", {0, n_train}}});
        write_series(with_suffix(o.out, ".test"), full.slice_rows(n_train, n), rc, {{"rows", {n_train, n}}});
        if (!o.force_out.empty()) {
            write_series(with_suffix(o.force_out, ".train"), force.slice_rows(0, n_train), rc,
                         {{"rows", {0, n_train}}});
            write_series(with_suffix(o.force_out, ".test"), force.slice_rows(n_train, n), rc,
                         {{"rows", {n_train, n}}});
        }
    }
    return kExitOk;
}

int cmd_fit(const FitOptions& o) {
    const json rc = run_config("fit", {{"reservoir", reservoir_settings(o.reservoir)},
                                       {"target", o.target},
                                       {"input", o.input},
                                       {"out", o.out}});
    const ReservoirConfig cfg = reservoir_from_flags(o.reservoir, true);
    const Series targets = load_values(o.target);
    const auto inputs = load_inputs(o.input);
    FitResult r = fit_detailed(cfg, inputs ? &*inputs : nullptr, targets.data);
    r.model.target_names = targets.columns;
    save_model(o.out, r.model, rc);
    std::cout << "train_nmse " << format_double(nmse(targets.data, r.fitted)) << '\n';
    return kExitOk;
}

int cmd_predict(const PredictOptions& o) {
    const json rc = run_config("predict", {{"model", o.model},
                                           {"steps", o.steps ? json(*o.steps) : json(nullptr)},
                                           {"input", o.input},
                                           {"out", o.out}});
    const TrainedModel model = load_model(o.model);
    const auto inputs = load_inputs(o.input);
    Eigen::Index n = 0;
    if (inputs) {
        n = o.steps ? *o.steps : inputs->rows();
        if (n > inputs->rows()) throw InvalidArgument("--steps exceeds the rows of --input");
    } else {
        if (!o.steps) throw InvalidArgument("--steps is required for a model without exogenous inputs");
        n = *o.steps;
    }
    if (n < 0) throw InvalidArgument("--steps must be >= 0");
    const RowMatrix x = inputs ? RowMatrix(inputs->topRows(n)) : RowMatrix();
    const RowMatrix pred = n == 0 ? RowMatrix(0, model.output_dim()) : predict(model, inputs ? &x : nullptr, n);

    Series s;
    s.columns.push_back("k");
    for (const auto& name : channel_names(model)) s.columns.push_back(name + "_pred");
    s.data.resize(n, 1 + pred.cols());
    s.data.col(0) = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
    s.data.rightCols(pred.cols()) = pred;
    write_series(o.out, s, rc);
    return kExitOk;
}

int cmd_test(const TestOptions& o) {
    const json rc = run_config("test", {{"model", o.model},
                                        {"target", o.target},
                                        {"input", o.input},
                                        {"criterion", o.criterion},
                                        {"out", o.out},
                                        {"prediction_out", o.prediction_out}});
    const Criterion criterion = parse_criterion(o.criterion);
    const TrainedModel model = load_model(o.model);
    if (!fs::exists(o.target)) throw InvalidArgument("file '" + o.target + "' does not exist");
    const Series file = read_csv(o.target);
    const Series truth = value_columns(file);
    const auto inputs = load_inputs(o.input);
    const TestResult r = test(model, inputs ? &*inputs : nullptr, truth.data, criterion);

    write_json(o.out, {{"criterion", std::string(to_string(criterion))},
                       {"score", r.score},
                       {"steps", truth.rows()},
                       {"run_config", rc}});
    if (!o.prediction_out.empty())
        write_series(o.prediction_out, comparison_series(file, truth.columns, truth.data, r.prediction), rc);
    std::cout << to_string(criterion) << ' ' << format_double(r.score) << '\n';
    return kExitOk;
}

int cmd_optimize(const OptimizeCliOptions& o) {
    json settings = {{"reservoir", reservoir_settings(o.reservoir)},
                     {"bounds", o.bounds},
                     {"config", o.config},
                     {"target", o.target},
                     {"input", o.input},
                     {"validation_fraction", o.validation_fraction},
                     {"criterion", o.criterion},
                     {"n_trust_regions", o.n_trust_regions},
                     {"max_evals", o.max_evals},
                     {"initial_samples", o.initial_samples},
                     {"batch_size", o.batch_size},
                     {"seed", o.seed},
                     {"resume", o.resume},
                     {"timing", o.timing},
                     {"out", o.out},
                     {"log", o.log}};
    const BoundsSpec bounds = o.bounds.empty() ? BoundsSpec::standard() : BoundsSpec::from_toml_file(o.bounds);
    settings["search_space"] = bounds.to_json();

    ObjectiveConfig objective;
    objective.validation_fraction = o.validation_fraction;
    objective.criterion = parse_criterion(o.criterion);
    if (!o.config.empty()) {
        if (!o.target.empty() || !o.input.empty()) throw InvalidArgument("use either --config or --target/--input");
        const ExperimentConfig ec = experiment_config_from_json(read_config_document(o.config));
        settings["experiment"] = to_json(ec);
        const auto& ts = ec.trajectory;
        const auto clean = integrate(ts.x0, ts.p0, ts.dt, ts.steps, ts.force);
        objective.base = ec.reservoir;
        objective.targets = add_noise(clean, ts.noise, ts.noise_seed).states();
        if (ec.parameter_aware) objective.inputs = clean.force_series();
    } else {
        if (o.target.empty()) throw InvalidArgument("--target or --config is required");
        objective.base = reservoir_from_flags(o.reservoir, false);
        objective.targets = load_values(o.target).data;
        objective.inputs = load_inputs(o.input);
    }
    objective.validate();
    settings["data_fingerprint"] = fingerprint(objective);
    settings["base_reservoir"] = to_json(objective.base);

    OptimizeOptions opts;
    opts.n_trust_regions = o.n_trust_regions;
    opts.max_evals = o.max_evals;
    opts.initial_samples = o.initial_samples;
    opts.batch_size = o.batch_size;
    opts.seed = o.seed;
    opts.validate();

    std::vector<Trial> replay;
    if (!o.resume.empty()) {
        if (!fs::exists(o.resume)) throw InvalidArgument("trial log '" + o.resume + "' does not exist");
        replay = read_trial_log(o.resume, bounds);
        const fs::path side = sidecar_path(o.resume);
        if (fs::exists(side)) {
            // Replayed points depend only on logged scores, so a changed
            // objective would go unnoticed without this check.
            const json logged = read_json_file(side).at("run_config").at("settings");
            if (resume_identity(logged) != resume_identity(settings))
                throw InvalidArgument("trial log '" + o.resume +
                                      "' was produced with different data or optimizer settings");
        }
    }

    const json rc = run_config("optimize", settings);
    const fs::path log_path = o.log;
    if (log_path.has_parent_path()) fs::create_directories(log_path.parent_path());
    std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw Error("cannot write trial log '" + o.log + "'");
    write_trial_log_header(log, bounds);
    write_json_file(sidecar_path(log_path), {{"run_config", rc}});
    auto on_round = [&](const std::vector<Trial>& batch) { write_trial_log_rows(log, bounds, batch, o.timing); };

    try {
        const OptimizeResult r = optimize(bounds, objective, opts, replay, on_round);
        write_json(o.out, {{"hyperparams", to_json(bounds.decode(r.best.point))},
                           {"score", r.best.score},
                           {"eval_index", r.best.eval_index},
                           {"evaluations", r.trials.size()},
                           {"replayed", std::min(replay.size(), r.trials.size())},
                           {"run_config", rc}});
        std::cout << "best " << format_double(r.best.score) << " at eval " << r.best.eval_index << '\n';
    } catch (const AllDiverged& e) {
        std::cerr << "error: " << e.what() << " (" << e.result().trials.size() << " trials logged to '" << o.log
                  << "')\n";
        return kExitAllDiverged;
    }
    return kExitOk;
}

int cmd_heatmap(const HeatmapCliOptions& o) {
    HeatmapConfig hc;
    hc.base = preset_pure_prediction();
    if (!o.config.empty()) hc = heatmap_config_from_json(read_config_document(o.config));
    if (o.family) hc.family = parse_force_family(*o.family);
    if (o.mode) hc.mode = parse_heatmap_mode(*o.mode);
    if (o.amplitudes) hc.amplitudes = parse_list(*o.amplitudes, "amplitude");
    if (o.frequencies) hc.frequencies = parse_list(*o.frequencies, "frequency");
    if (o.seed) hc.base.reservoir.seed = *o.seed;
    if (!o.hps.empty()) hc.base.reservoir.hps = hyperparams_from_json(read_json_file(o.hps));
    hc.validate();

    json settings = to_json(hc);
    settings["out"] = o.out;
    settings["svg"] = o.svg;
    const json rc = run_config("heatmap", settings);
    const HeatmapResult r = run_heatmap(hc);

    int masked = 0, failed = 0;
    for (const auto& c : r.cells) {
        masked += c.masked;
        failed += c.failed;
    }
    const double median = r.median_nmse();
    write_series(o.out, r.to_series(), rc,
                 {{"median_nmse", std::isnan(median) ? json(nullptr) : json(median)},
                  {"masked_cells", masked},
                  {"failed_cells", failed}});
    const fs::path svg = o.svg.empty() ? fs::path(o.out).replace_extension(".svg") : fs::path(o.svg);
    write_text(svg, heatmap_svg(r, std::string(to_string(r.family)) + " forcing, " + std::string(to_string(r.mode)) +
                                       " (log10 NMSE)"));
    std::cout << "median_nmse " << (std::isnan(median) ? "nan" : format_double(median)) << '\n';
    return kExitOk;
}

int cmd_plot(const PlotOptionsCli& o) {
    const PlotKind kind = parse_plot_kind(o.kind);
    if (!fs::exists(o.in)) throw InvalidArgument("file '" + o.in + "' does not exist");
    write_text(o.out, prediction_plot(read_csv(o.in), kind));
    return kExitOk;
}

int cmd_forecast(const ExperimentCliOptions& o) {
    const ExperimentConfig ec = load_experiment(o, "pure_prediction");
    const json rc = run_config("forecast", to_json(ec));
    const ForecastReport r = run_forecast(ec);
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);
    const Series s = r.prediction_series();
    write_series(dir / "prediction.csv", s, rc);
    write_json(dir / "summary.json", {{"train_nmse", r.train_nmse},
                                      {"test_nmse", r.test_nmse},
                                      {"train_rows", r.train_rows},
                                      {"test_rows", r.truth.rows()},
                                      {"run_config", rc}});
    write_forecast_plots(dir, s);
    if (o.timing) write_json(dir / "timing.json", {{"fit_ms", r.fit_ms}, {"predict_ms", r.predict_ms}});
    std::cout << "test_nmse " << format_double(r.test_nmse) << '\n';
    return kExitOk;
}

int cmd_noise_study(const ExperimentCliOptions& o) {
    const ExperimentConfig ec = load_experiment(o, "noise_study");
    const json rc = run_config("noise-study", to_json(ec));
    const NoiseStudyReport r = run_noise_study(ec);
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);

    write_series(dir / "pure.csv", r.pure.prediction_series(), rc);
    write_series(dir / "parameter_aware.csv", r.parameter_aware.prediction_series(), rc);
    Series clean{{"t", "x", "p"}, RowMatrix(r.pure.clean.size(), 3)};
    clean.data << r.pure.clean.t, r.pure.clean.states();
    write_series(dir / "clean.csv", clean, rc);
    const auto n = r.pure.train_rows;
    Series noisy{{"t", "x", "p"}, RowMatrix(n, 3)};
    noisy.data << r.pure.observed.t.head(n), r.pure.observed.states().topRows(n);
    write_series(dir / "noisy_training.csv", noisy, rc);

    write_json(dir / "summary.json", {{"pure_nmse", r.pure.test_nmse},
                                      {"parameter_aware_nmse", r.parameter_aware.test_nmse},
                                      {"clean_pure_nmse", r.clean_pure_nmse},
                                      {"clean_parameter_aware_nmse", r.clean_parameter_aware_nmse},
                                      {"noisy_data_phase_error", r.noisy_data_phase_error},
                                      {"pure_phase_error", r.pure_phase_error},
                                      {"parameter_aware_phase_error", r.parameter_aware_phase_error},
                                      {"run_config", rc}});
    write_text(dir / "phase.svg",
               line_plot({{"noisy training data", noisy.data.col(1), noisy.data.col(2), "#bbbbbb"},
                          {"clean", clean.data.col(1), clean.data.col(2), "#1f77b4"},
                          {"pure", r.pure.prediction.col(0), r.pure.prediction.col(1), "#ff7f0e"},
                          {"parameter-aware", r.parameter_aware.prediction.col(0), r.parameter_aware.prediction.col(1),
                           "#d62728"}},
                         {"Phase space under noisy training", "x", "p"}));
    if (o.timing)
        write_json(dir / "timing.json", {{"pure_fit_ms", r.pure.fit_ms},
                                         {"pure_predict_ms", r.pure.predict_ms},
                                         {"parameter_aware_fit_ms", r.parameter_aware.fit_ms},
                                         {"parameter_aware_predict_ms", r.parameter_aware.predict_ms}});
    std::cout << "pure_nmse " << format_double(r.pure.test_nmse) << "\nparameter_aware_nmse "
              << format_double(r.parameter_aware.test_nmse) << '\n';
    return kExitOk;
}

}  // namespace resonant::cli
