#include "resonant/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "resonant/bayesopt.hpp"
#include "resonant/errors.hpp"
#include "resonant/parallel.hpp"

namespace resonant {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

constexpr double kPi = 3.141592653589793;

}  // namespace

void TrajectorySpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    if (steps < 3) throw InvalidArgument("a trajectory needs at least 3 steps");
    if (!(noise >= 0.0)) throw InvalidArgument("noise amplitude must be >= 0");
    if (!std::isfinite(force.amplitude) || !std::isfinite(force.frequency))
        throw InvalidArgument("force parameters must be finite");
}

void ExperimentConfig::validate() const {
    trajectory.validate();
    reservoir.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidArgument("train fraction must lie in (0, 1)");
    const auto n = train_rows();
    if (n < 2 || n >= trajectory.steps) throw InvalidArgument("split leaves no training or test rows");
}

Eigen::Index ExperimentConfig::train_rows() const {
    return static_cast<Eigen::Index>(std::llround(train_fraction * trajectory.steps));
}

Series ForecastReport::prediction_series() const {
    const auto n = truth.rows();
    Series s{{"t", "x", "p", "x_pred", "p_pred", "x_residual", "p_residual"}, RowMatrix(n, 7)};
    s.data.col(0) = clean.t.tail(n);
    s.data.middleCols(1, 2) = truth;
    s.data.middleCols(3, 2) = prediction;
    s.data.middleCols(5, 2) = truth - prediction;
    return s;
}

ForecastReport run_forecast(const ExperimentConfig& config) {
    config.validate();
    const auto& ts = config.trajectory;
    ForecastReport r;
    r.clean = integrate(ts.x0, ts.p0, ts.dt, ts.steps, ts.force);
    r.observed = add_noise(r.clean, ts.noise, ts.noise_seed);
    r.train_rows = config.train_rows();
    const auto n = r.train_rows;
    const auto m = static_cast<Eigen::Index>(ts.steps) - n;

    const RowMatrix observed = r.observed.states();
    const RowMatrix clean = r.clean.states();
    const RowMatrix y_train = observed.topRows(n);
    r.truth = clean.bottomRows(m);

    RowMatrix force;
    if (config.parameter_aware) force = r.clean.force_series();
    const RowMatrix x_train = config.parameter_aware ? RowMatrix(force.topRows(n)) : RowMatrix();
    const RowMatrix x_test = config.parameter_aware ? RowMatrix(force.bottomRows(m)) : RowMatrix();

    auto start = std::chrono::steady_clock::now();
    const FitResult fitted = fit_detailed(config.reservoir, config.parameter_aware ? &x_train : nullptr, y_train);
    r.fit_ms = elapsed_ms(start);
    r.train_nmse = nmse(clean.topRows(n), fitted.fitted);

    start = std::chrono::steady_clock::now();
    r.prediction = predict(fitted.model, config.parameter_aware ? &x_test : nullptr, m);
    r.predict_ms = elapsed_ms(start);
    r.test_nmse = nmse(r.truth, r.prediction);
    return r;
}

double mean_nearest_distance(const RowMatrix& points, const RowMatrix& orbit) {
    if (points.cols() != orbit.cols()) throw DimensionMismatch("points and orbit differ in dimension");
    if (points.rows() == 0 || orbit.rows() == 0) throw InvalidArgument("empty point set");
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double d2 = (orbit.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff();
        total += std::sqrt(d2);
    }
    return total / static_cast<double>(points.rows());
}

NoiseStudyReport run_noise_study(const ExperimentConfig& config) {
    ExperimentConfig pure = config;
    pure.parameter_aware = false;
    ExperimentConfig aware = config;
    aware.parameter_aware = true;

    NoiseStudyReport r;
    r.pure = run_forecast(pure);
    r.parameter_aware = run_forecast(aware);

    ExperimentConfig clean_pure = pure, clean_aware = aware;
    clean_pure.trajectory.noise = 0.0;
    clean_aware.trajectory.noise = 0.0;
    r.clean_pure_nmse = run_forecast(clean_pure).test_nmse;
    r.clean_parameter_aware_nmse = run_forecast(clean_aware).test_nmse;

    const RowMatrix orbit = r.pure.clean.states();
    r.noisy_data_phase_error = mean_nearest_distance(r.pure.observed.states().topRows(r.pure.train_rows), orbit);
    r.pure_phase_error = mean_nearest_distance(r.pure.prediction, orbit);
    r.parameter_aware_phase_error = mean_nearest_distance(r.parameter_aware.prediction, orbit);
    return r;
}

std::string_view to_string(HeatmapMode m) { return m == HeatmapMode::pure ? "pure" : "parameter_aware"; }

HeatmapMode parse_heatmap_mode(std::string_view name) {
    if (name == "pure") return HeatmapMode::pure;
    if (name == "parameter_aware" || name == "parameter-aware") return HeatmapMode::parameter_aware;
    throw InvalidArgument("unknown heatmap mode '" + std::string(name) + "' (pure or parameter_aware)");
}

void HeatmapConfig::validate() const {
    if (amplitudes.empty() || frequencies.empty()) throw InvalidArgument("heatmap grids must be non-empty");
    base.validate();
}

double HeatmapResult::median_nmse() const {
    std::vector<double> v;
    for (const auto& c : cells)
        if (!c.masked) v.push_back(c.nmse);
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Series HeatmapResult::to_series() const {
    Series s{{"amplitude", "frequency", "masked", "failed", "nmse"},
             RowMatrix(static_cast<Eigen::Index>(cells.size()), 5)};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const auto r = static_cast<Eigen::Index>(i);
        s.data.row(r) << c.amplitude, c.frequency, c.masked ? 1.0 : 0.0, c.failed ? 1.0 : 0.0,
            c.masked ? std::numeric_limits<double>::quiet_NaN() : c.nmse;
    }
    return s;
}

HeatmapResult run_heatmap(const HeatmapConfig& config) {
    config.validate();
    HeatmapResult out;
    out.amplitudes = config.amplitudes;
    out.frequencies = config.frequencies;
    out.family = config.family;
    out.mode = config.mode;
    out.cells.resize(config.amplitudes.size() * config.frequencies.size());

    const int workers = config.workers > 0 ? config.workers : worker_count();
    parallel_for(out.cells.size(), workers, [&](std::size_t i) {
        HeatmapCell& cell = out.cells[i];
        cell.amplitude = config.amplitudes[i / config.frequencies.size()];
        cell.frequency = config.frequencies[i % config.frequencies.size()];
        ExperimentConfig cfg = config.base;
        cfg.trajectory.force = {config.family, cell.amplitude, cell.frequency};
        cfg.parameter_aware = config.mode == HeatmapMode::parameter_aware;
        const auto& ts = cfg.trajectory;
        if (detect_resonance(integrate(ts.x0, ts.p0, ts.dt, ts.steps, ts.force), config.resonance)) {
            cell.masked = true;
            return;
        }
        try {
            cell.nmse = run_forecast(cfg).test_nmse;
        } catch (const NonFiniteState&) {
            cell.failed = true;
            cell.nmse = kPenaltyScore;
        } catch (const IllConditioned&) {
            cell.failed = true;
            cell.nmse = kPenaltyScore;
        }
    });
    return out;
}

HyperParams reference_hyperparams() {
    HyperParams h;
    h.n_nodes = 202;
    h.spectral_radius = 1.1329107284545898;
    h.connectivity = 0.4071449746896983;
    h.leaking_rate = 0.009808523580431938;
    h.bias = 0.48509588837623596;
    h.regularization = 1.6862021450927922;
    return h;
}

ExperimentConfig preset_pure_prediction(std::uint64_t seed) {
    ExperimentConfig c;
    c.trajectory.force = {ForceFamily::sin, 0.5, 0.2};
    c.trajectory.dt = 1.0 / (20.0 * kPi);
    c.trajectory.steps = 12000;
    c.trajectory.x0 = 0.1;
    c.trajectory.p0 = 0.1;
    c.train_fraction = 0.2;
    c.reservoir.hps = reference_hyperparams();
    c.reservoir.feedback = true;
    c.reservoir.seed = seed;
    return c;
}

ExperimentConfig preset_parameter_aware(std::uint64_t seed) {
    ExperimentConfig c = preset_pure_prediction(seed);
    c.parameter_aware = true;
    return c;
}

ExperimentConfig preset_multi_activation(std::uint64_t seed) {
    ExperimentConfig c = preset_parameter_aware(seed);
    c.reservoir.activation =
        ActivationMix({{Activation::tanh, 0.1}, {Activation::relu, 0.9}, {Activation::sin, 0.05}});
    c.reservoir.output_activation = Activation::tanh;
    return c;
}

ExperimentConfig preset_noise_study(std::uint64_t seed) {
    ExperimentConfig c = preset_pure_prediction(seed);
    c.trajectory.force = {ForceFamily::sin, 0.5, 0.3867};
    c.trajectory.steps = 20000;
    c.trajectory.noise = 0.15;
    c.trajectory.noise_seed = 5;
    c.train_fraction = 0.4;
    return c;
}

ExperimentConfig preset_reoptimization(std::uint64_t seed) {
    ExperimentConfig c = preset_parameter_aware(seed);
    c.trajectory.force = {ForceFamily::sincos, 0.5, 0.6};
    c.trajectory.steps = 4000;
    c.reservoir.activation =
        ActivationMix({{Activation::relu, 0.33}, {Activation::tanh, 0.5}, {Activation::sin, 0.1}});
    return c;
}

}  // namespace resonant
