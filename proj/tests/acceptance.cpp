// Acceptance suite: one PASS/FAIL line per criterion, with the individual
// checks listed beneath it. Exit status is nonzero when any check fails that
// is not named by --known-failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_harness.hpp"
#include "oracles.hpp"
#include "resonant/bayesopt.hpp"
#include "resonant/bounds.hpp"
#include "resonant/experiments.hpp"
#include "resonant/gp.hpp"
#include "resonant/model.hpp"
#include "resonant/pendulum.hpp"
#include "resonant/random.hpp"
#include "resonant/reservoir.hpp"

using namespace resonant;

namespace {

struct Check {
    std::string id;
    bool pass = false;
    std::string detail;
};

using Checks = std::vector<Check>;

struct Item {
    std::string id;
    std::string title;
    double time_limit_s;
    std::function<Checks()> run;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RowMatrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
    RowMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
    return m;
}

// ---------------------------------------------------------------- 1

Checks ridge_oracle() {
    Rng rng(20240101);
    double worst = 0.0;
    int n_max = 0, k_max = 0;
    for (int inst = 0; inst < 20; ++inst) {
        ReservoirConfig cfg;
        cfg.hps.n_nodes = 5 + static_cast<int>(uniform_index(rng, 26));
        cfg.hps.connectivity = uniform(rng, 0.1, 0.5);
        cfg.hps.spectral_radius = uniform(rng, 0.5, 1.2);
        cfg.hps.leaking_rate = uniform(rng, 0.2, 1.0);
        cfg.hps.bias = uniform(rng, 0.0, 1.0);
        cfg.hps.regularization = std::pow(10.0, uniform(rng, -3.0, 1.0));
        cfg.feedback = inst % 2 == 0;
        cfg.seed = 500 + inst;
        const auto k = 100 + static_cast<Eigen::Index>(uniform_index(rng, 201));
        const int p = 1 + static_cast<int>(uniform_index(rng, 2));
        const bool exogenous = inst % 3 != 0;
        n_max = std::max(n_max, cfg.hps.n_nodes);
        k_max = std::max(k_max, static_cast<int>(k));

        RowMatrix y(k, p);
        const double w = uniform(rng, 0.02, 0.2);
        for (Eigen::Index i = 0; i < k; ++i)
            for (int c = 0; c < p; ++c) y(i, c) = std::sin(w * i + c) + 0.1 * uniform(rng, -1.0, 1.0);
        const RowMatrix x = uniform_matrix(rng, k, 1);

        const auto res = fit_detailed(cfg, exogenous ? &x : nullptr, y);
        const TrainedModel& m = res.model;

        // Design matrix the readout was trained on: washed-out states plus a bias column.
        const RowMatrix z = m.target_scaler.apply(y);
        const RowMatrix exo = exogenous ? m.input_scaler->apply(x) : RowMatrix::Ones(k, 1);
        const RowMatrix u = training_inputs(exo, z, cfg.feedback);
        const int n = m.weights.n_nodes();
        const auto trace = evolve_states(m.weights, u, Eigen::VectorXd::Zero(n), cfg.hps.leaking_rate);
        const auto rows = k - res.washout;
        RowMatrix design(rows, n + 1);
        design.leftCols(n) = trace.states.bottomRows(rows);
        design.col(n).setOnes();
        const Eigen::MatrixXd expected = oracle::iterative_ridge(design, z.bottomRows(rows), cfg.hps.regularization);

        const auto& r = *m.weights.readout();
        Eigen::MatrixXd got(r.w_out.rows(), n + 1);
        got.leftCols(n) = r.w_out;
        got.col(n) = r.c;
        worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
    }
    return {{"1a", worst <= 1e-5,
             fmt("20 instances (N<=%d, K<=%d, P<=2): max |W_out - W_cg| = %.2e (tol 1e-5)", n_max, k_max, worst)}};
}

// ---------------------------------------------------------------- 2

Checks spectral_radius() {
    Rng rng(77);
    const int sizes[] = {50, 202, 500};
    double worst = 0.0;
    int count = 0;
    for (int i = 0; i < 50; ++i) {
        HyperParams h;
        h.n_nodes = sizes[i % 3];
        h.spectral_radius = uniform(rng, 0.3, 2.0);
        h.connectivity = uniform(rng, 0.05, 0.5);
        const auto w = build_weights(h, 1, 1000 + i);
        const double exact = oracle::dense_radius(w.w_res());
        worst = std::max(worst, std::abs(exact - h.spectral_radius) / h.spectral_radius);
        ++count;
    }
    return {{"2a", worst <= 1e-4,
             fmt("%d reservoirs, N in {50,202,500}: max relative |lambda_max - rho| = %.2e (dense eigensolver, tol 1e-4)",
                 count, worst)}};
}

// ---------------------------------------------------------------- 3

Checks echo_state() {
    int worst_steps = 0;
    double worst_final = 0.0;
    for (int s = 0; s < 10; ++s) {
        HyperParams h = reference_hyperparams();
        h.spectral_radius = 0.8;
        h.leaking_rate = 1.0;
        const auto w = build_weights(h, 1, 300 + s);
        Rng rng(900 + s);
        const RowMatrix u = uniform_matrix(rng, 500, 1);
        Eigen::VectorXd h0(h.n_nodes);
        for (auto& v : h0) v = uniform(rng, -1.0, 1.0);
        const auto a = evolve_states(w, u, Eigen::VectorXd::Zero(h.n_nodes), 1.0);
        const auto b = evolve_states(w, u, h0, 1.0);
        int first = -1;
        for (Eigen::Index k = 0; k < 500; ++k) {
            if ((a.states.row(k) - b.states.row(k)).cwiseAbs().maxCoeff() < 1e-6) {
                first = static_cast<int>(k) + 1;
                break;
            }
        }
        worst_steps = first < 0 ? 501 : std::max(worst_steps, first);
        worst_final = std::max(worst_final, (a.states.row(499) - b.states.row(499)).cwiseAbs().maxCoeff());
        if (first < 0) break;
    }
    return {{"3a", worst_steps <= 500,
             fmt("10 seeds, rho=0.8: |dh|_inf < 1e-6 reached within %d steps (limit 500); final gap %.1e",
                 worst_steps, worst_final)}};
}

// ---------------------------------------------------------------- 4

Checks integrator() {
    const ForceSpec f{ForceFamily::sin, 0.5, 0.2};
    const double t_end = 20.0;
    std::vector<double> diffs;
    for (int level = 0; level < 4; ++level) {
        const int n = 100 << level;
        const auto a = integrate(0.5, 0.5, t_end / n, n + 1, f);
        const auto b = integrate(0.5, 0.5, t_end / (2 * n), 2 * n + 1, f);
        double d = 0.0;
        for (Eigen::Index k = 0; k < a.size(); ++k)
            d = std::max({d, std::abs(a.x[k] - b.x[2 * k]), std::abs(a.p[k] - b.p[2 * k])});
        diffs.push_back(d);
    }
    bool ratios_ok = true;
    std::string ratios;
    for (std::size_t i = 1; i < diffs.size(); ++i) {
        const double r = diffs[i - 1] / diffs[i];
        ratios_ok = ratios_ok && r >= 8.0 && r <= 32.0;
        ratios += fmt("%s%.2f", i > 1 ? ", " : "", r);
    }

    const double dt = 1.0 / (20.0 * std::numbers::pi);
    const auto tr = integrate(0.5, 0.5, dt, 10001, {});
    const double e0 = 0.5 * 0.25 - std::cos(0.5);
    double drift = 0.0;
    for (Eigen::Index k = 0; k < tr.size(); ++k)
        drift = std::max(drift, std::abs(0.5 * tr.p[k] * tr.p[k] - std::cos(tr.x[k]) - e0));
    return {{"4a", ratios_ok, "step-halving error ratios " + ratios + " (band [8, 32])"},
            {"4b", drift < 1e-6, fmt("unforced energy drift over 1e4 steps = %.2e (tol 1e-6)", drift)}};
}

// ---------------------------------------------------------------- 5

Checks forecast_reproduction() {
    struct Row {
        const char* id;
        const char* name;
        ExperimentConfig (*preset)(std::uint64_t);
        double bound;
    };
    const Row rows[] = {{"5a", "pure prediction", preset_pure_prediction, 0.282},
                        {"5b", "parameter-aware", preset_parameter_aware, 0.17},
                        {"5c", "multi-activation", preset_multi_activation, 0.01}};
    Checks out;
    double slowest = 0.0;
    double worst_consistency = 0.0;
    for (const auto& row : rows) {
        double best = INFINITY;
        std::uint64_t best_seed = 0;
        std::string all;
        for (std::uint64_t seed = 210; seed < 215; ++seed) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = run_forecast(row.preset(seed));
            slowest = std::max(slowest, seconds_since(t0));
            const double direct = oracle::direct_nmse(r.truth, r.prediction);
            worst_consistency = std::max(worst_consistency, std::abs(direct - r.test_nmse) / direct);
            all += fmt("%s%.4f", seed > 210 ? " " : "", direct);
            if (direct < best) {
                best = direct;
                best_seed = seed;
            }
        }
        out.push_back({row.id, best <= row.bound,
                       fmt("%s: best NMSE %.4f (seed %lu) vs bound %.3f; seeds 210-214: ", row.name, best,
                           static_cast<unsigned long>(best_seed), row.bound) +
                           all});
    }
    out.push_back({"5d", worst_consistency <= 1e-12,
                   fmt("reported NMSE equals direct recomputation (max rel diff %.1e)", worst_consistency)});
    out.push_back({"5e", slowest < 120.0, fmt("slowest single run %.1f s (limit 120 s)", slowest)});
    return out;
}

// ---------------------------------------------------------------- 6

double brute_nearest(const RowMatrix& pts, const RowMatrix& orbit) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        double best = INFINITY;
        for (Eigen::Index j = 0; j < orbit.rows(); ++j) {
            const double dx = pts(i, 0) - orbit(j, 0), dp = pts(i, 1) - orbit(j, 1);
            best = std::min(best, dx * dx + dp * dp);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(pts.rows());
}

Checks noise_recovery() {
    const auto r = run_noise_study(preset_noise_study());
    const RowMatrix orbit = r.pure.clean.states();
    const double data = brute_nearest(r.pure.observed.states().topRows(r.pure.train_rows), orbit);
    const double pure = brute_nearest(r.pure.prediction, orbit);
    const double aware = brute_nearest(r.parameter_aware.prediction, orbit);
    const double pure_nmse = oracle::direct_nmse(r.pure.truth, r.pure.prediction);
    const double aware_nmse = oracle::direct_nmse(r.parameter_aware.truth, r.parameter_aware.prediction);
    const double agree = std::max({std::abs(data - r.noisy_data_phase_error) / data,
                                   std::abs(pure - r.pure_phase_error) / pure,
                                   std::abs(aware - r.parameter_aware_phase_error) / aware});
    return {{"6a", aware_nmse < pure_nmse,
             fmt("noise +-0.15: parameter-aware NMSE %.4f < pure NMSE %.4f", aware_nmse, pure_nmse)},
            {"6b", aware < data,
             fmt("parameter-aware phase error %.4f < noisy-data phase error %.4f", aware, data)},
            {"6c", pure < data, fmt("pure phase error %.4f < noisy-data phase error %.4f", pure, data)},
            {"6d", agree <= 1e-9, fmt("library phase errors match brute-force recomputation (rel %.1e)", agree)}};
}

// ---------------------------------------------------------------- 7

ObjectiveConfig reoptimization_objective() {
    const auto cfg = preset_reoptimization();
    const auto& t = cfg.trajectory;
    const auto clean = integrate(t.x0, t.p0, t.dt, t.steps, t.force);
    ObjectiveConfig obj;
    obj.base = cfg.reservoir;
    obj.targets = clean.states();
    obj.inputs = clean.force_series();
    return obj;
}

/// Refits the returned hyper-parameters and scores the held-out tail directly.
double validation_nmse(const HyperParams& hps, const ObjectiveConfig& obj) {
    const auto k = obj.targets.rows();
    const auto n_train = static_cast<Eigen::Index>(std::floor(k * (1.0 - obj.validation_fraction)));
    ReservoirConfig cfg = obj.base;
    cfg.hps = hps;
    const RowMatrix x_train = obj.inputs->topRows(n_train), x_val = obj.inputs->bottomRows(k - n_train);
    const auto m = fit(cfg, x_train, obj.targets.topRows(n_train));
    return oracle::direct_nmse(obj.targets.bottomRows(k - n_train), predict(m, x_val));
}

Checks bo_reoptimization(bool full_scale) {
    const auto obj = reoptimization_objective();
    Checks out;

    const auto desk_bounds = BoundsSpec::from_toml_string(
        "log_connectivity = [-2, -0.1]\nspectral_radius = [0.6, 2]\nn_nodes = [100, 103]\n"
        "log_regularization = [-3, 3]\nleaking_rate = [0, 1]\nbias = [0, 1]\n");
    OptimizeOptions desk;
    desk.n_trust_regions = 3;
    desk.max_evals = 150;
    auto t0 = std::chrono::steady_clock::now();
    const auto r = optimize(desk_bounds, obj, desk);
    const double desk_s = seconds_since(t0);
    const HyperParams best = desk_bounds.decode(r.best.point);
    const double v = validation_nmse(best, obj);
    out.push_back({"7a", v <= 0.05 && r.trials.size() == 150,
                   fmt("desk scale (N in [100,103], 3 regions, 150 evals): validation NMSE %.2e (bound 0.05), N=%d",
                       v, best.n_nodes)});
    out.push_back({"7b", desk_s < 1200.0, fmt("desk-scale run %.1f s (limit 20 min)", desk_s)});

    if (!full_scale) {
        out.push_back({"7c", false, "full-scale run skipped (--skip-full-bo)"});
        return out;
    }
    OptimizeOptions paper;
    paper.n_trust_regions = 6;
    paper.max_evals = 1200;
    const auto bounds = BoundsSpec::standard();
    t0 = std::chrono::steady_clock::now();
    const auto full = optimize(bounds, obj, paper);
    const double full_s = seconds_since(t0);
    const HyperParams fb = bounds.decode(full.best.point);
    const double fv = validation_nmse(fb, obj);
    out.push_back({"7c", fv <= 0.01 && full.trials.size() == 1200,
                   fmt("full scale (standard bounds, 6 regions, 1200 evals): validation NMSE %.2e (bound 0.01) at "
                       "eval %d, %.0f s; N=%d rho=%.3f zeta=%.3f alpha=%.4f beta=%.3g",
                       fv, full.best.eval_index, full_s, fb.n_nodes, fb.spectral_radius, fb.connectivity,
                       fb.leaking_rate, fb.regularization)});
    return out;
}

// ---------------------------------------------------------------- 8

Checks bo_mechanics() {
    Checks out;
    bool budget_ok = true, monotone_ok = true;
    std::string budgets;
    for (int budget : {7, 20, 33, 61}) {
        OptimizeOptions o;
        o.n_trust_regions = 2;
        o.initial_samples = 3;
        o.max_evals = budget;
        o.batch_size = budget % 2 == 0 ? 1 : 3;
        o.seed = static_cast<std::uint64_t>(budget);
        const auto r = optimize_unit_cube(3, [](const Eigen::VectorXd& u) { return std::sin(5 * u[0]) + u.sum(); }, o);
        budget_ok = budget_ok && static_cast<int>(r.trials.size()) == budget;
        for (std::size_t i = 1; i < r.incumbent.size(); ++i) monotone_ok = monotone_ok && r.incumbent[i] <= r.incumbent[i - 1];
        budgets += fmt("%s%d->%zu", budgets.empty() ? "" : ", ", budget, r.trials.size());
    }
    out.push_back({"8a", budget_ok, "evaluations equal max_evals exactly: " + budgets});
    out.push_back({"8b", monotone_ok, "incumbent trace is non-increasing"});

    const Eigen::Vector2d minimum(0.3, 0.7);
    OptimizeOptions o;
    o.n_trust_regions = 2;
    o.max_evals = 60;
    o.initial_samples = 10;
    o.seed = 3;
    const auto bowl = optimize_unit_cube(2, [&](const Eigen::VectorXd& u) { return (u - minimum).squaredNorm(); }, o);
    const double miss = (bowl.best.point - minimum).cwiseAbs().maxCoeff();
    out.push_back({"8c", miss <= 0.05 && bowl.trials.size() <= 60,
                   fmt("quadratic bowl: best point within %.4f of the minimum after %zu evals (tol 0.05, <= 60)", miss,
                       bowl.trials.size())});

    Rng rng(41);
    const RowMatrix x = uniform_matrix(rng, 12, 3, 0.0, 1.0);
    Eigen::VectorXd y(12);
    for (Eigen::Index i = 0; i < 12; ++i) y[i] = std::cos(4 * x(i, 0)) - x(i, 1) + 0.1 * x(i, 2);
    y = (y.array() - y.mean()) / std::sqrt((y.array() - y.mean()).square().mean());
    GpHyper h;
    h.lengthscales = Eigen::Vector3d(0.3, 0.8, 1.7);
    h.outputscale = 1.3;
    h.noise = 0.01;
    Eigen::VectorXd grad;
    log_marginal_likelihood(x, y, h, &grad);
    const Eigen::VectorXd theta = h.to_log();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double step = 1e-5;
        Eigen::VectorXd up = theta, down = theta;
        up[i] += step;
        down[i] -= step;
        const double fd = (log_marginal_likelihood(x, y, GpHyper::from_log(up)) -
                           log_marginal_likelihood(x, y, GpHyper::from_log(down))) /
                          (2 * step);
        worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(fd), 1e-3));
    }
    out.push_back({"8d", worst <= 1e-4,
                   fmt("GP log-marginal-likelihood gradient vs central differences: max rel err %.2e (tol 1e-4)",
                       worst)});
    return out;
}

// ---------------------------------------------------------------- 9

Checks heatmap_transfer() {
    Checks out;
    const char* ids[] = {"9a", "9b"};
    int i = 0;
    for (ForceFamily family : {ForceFamily::sin, ForceFamily::sincos}) {
        HeatmapConfig cfg;
        cfg.base = preset_pure_prediction();
        cfg.family = family;
        cfg.mode = HeatmapMode::pure;
        const auto pure = run_heatmap(cfg);
        cfg.mode = HeatmapMode::parameter_aware;
        const auto aware = run_heatmap(cfg);
        const double mp = pure.median_nmse(), ma = aware.median_nmse();
        out.push_back({ids[i++], ma < mp,
                       fmt("%s: parameter-aware median NMSE %.4f < pure median %.4f over %zux%zu grid",
                           family == ForceFamily::sin ? "sin" : "sincos", ma, mp, pure.amplitudes.size(),
                           pure.frequencies.size())});
        if (family == ForceFamily::sin) {
            auto index = [](const std::vector<double>& v, double x) {
                return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
            };
            const auto a = index(pure.amplitudes, 0.5), f = index(pure.frequencies, 0.85);
            const bool masked = pure.at(a, f).masked && aware.at(a, f).masked;
            out.push_back({"9c", masked, fmt("sin cell (0.5, 0.85) masked as resonant: %s", masked ? "yes" : "no")});
        }
    }
    return out;
}

// ---------------------------------------------------------------- 10

using Snapshot = std::map<std::string, std::string>;

Snapshot snapshot(const std::filesystem::path& dir) {
    Snapshot s;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            s[std::filesystem::relative(e.path(), dir).string()] = cli_harness::read_file(e.path());
    return s;
}

Checks cli_determinism() {
    const auto root = std::filesystem::temp_directory_path() / ("resonant_acceptance_" + std::to_string(::getpid()));
    const auto dir = root / "run";
    auto p = [&](const std::string& name) { return (dir / name).string(); };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"generate-data", "generate-data --amp 0.5 --freq 0.2 --steps 3000 --noise 0.05 --seed 4 --out " + p("traj.csv") +
                              " --force-out " + p("f.csv") + " --split 0.2"},
        {"fit", "fit --hps " + p("hps.json") + " --target " + p("traj.train.csv") + " --input " + p("f.train.csv") +
                    " --feedback --seed 210 --activation tanh=0.5,relu=0.3,sin=0.2 --out " + p("model.json")},
        {"predict", "predict --model " + p("model.json") + " --input " + p("f.test.csv") + " --out " + p("pred.csv")},
        {"test", "test --model " + p("model.json") + " --target " + p("traj.test.csv") + " --input " + p("f.test.csv") +
                     " --out " + p("score.json") + " --prediction-out " + p("tested.csv")},
        {"optimize", "optimize --bounds " + p("bounds.toml") + " --target " + p("traj.train.csv") + " --input " +
                         p("f.train.csv") + " --feedback --n-trust-regions 2 --max-evals 25 --initial-samples 5 --bo-seed 9"
                         " --out " + p("best.json") + " --log " + p("trials.csv")},
        {"heatmap", "heatmap --config " + p("heat.toml") + " --mode parameter_aware --out " + p("grid.csv")},
        {"plot", "plot --kind phase --in " + p("tested.csv") + " --out " + p("phase.svg")},
        {"forecast", "forecast --config " + p("exp.toml") + " --out-dir " + p("fc")},
        {"noise-study", "noise-study --config " + p("noise.toml") + " --out-dir " + p("ns")},
    };

    auto pass = [&](std::string& failed_cmd) {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        cli_harness::write_file(p("hps.json"), cli_harness::kReferenceHps);
        cli_harness::write_file(p("bounds.toml"),
                                "log_connectivity = [-2, -0.1]\nspectral_radius = [0.6, 2]\nn_nodes = [30, 33]\n"
                                "log_regularization = [-3, 3]\nleaking_rate = [0, 1]\nbias = [0, 1]\n");
        cli_harness::write_file(p("heat.toml"), "[reservoir.hyperparams]\nn_nodes = 30\n[trajectory]\nsteps = 3000\n"
                                                "[heatmap]\namplitudes = [0.2, 0.5]\nfrequencies = [0.3, 0.85]\n");
        cli_harness::write_file(p("exp.toml"), "preset = \"multi_activation\"\n[trajectory]\nsteps = 3000\n"
                                               "[reservoir.hyperparams]\nn_nodes = 60\n");
        cli_harness::write_file(p("noise.toml"), "preset = \"noise_study\"\n[trajectory]\nsteps = 3000\n"
                                                 "[reservoir.hyperparams]\nn_nodes = 40\n");
        for (const auto& [name, args] : commands) {
            if (cli_harness::run(args) != 0) {
                failed_cmd = name;
                return Snapshot{};
            }
        }
        return snapshot(dir);
    };

    std::string failed;
    const Snapshot first = pass(failed);
    Snapshot second;
    if (failed.empty()) second = pass(failed);
    std::filesystem::remove_all(root);
    if (!failed.empty()) return {{"10a", false, "command '" + failed + "' exited nonzero"}};

    std::vector<std::string> differing;
    std::size_t data_files = 0;
    for (const auto& [name, bytes] : first) {
        const auto ext = std::filesystem::path(name).extension();
        if (ext == ".csv" || ext == ".json") ++data_files;
        const auto it = second.find(name);
        if (it == second.end() || it->second != bytes) differing.push_back(name);
    }
    if (second.size() != first.size()) differing.push_back("(file set)");
    std::string detail = fmt("%zu subcommands run twice; %zu output files (%zu CSV/JSON) compared byte for byte",
                             commands.size(), first.size(), data_files);
    for (const auto& d : differing) detail += "; differs: " + d;
    return {{"10a", differing.empty(), detail}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonant acceptance suite"};
    std::vector<std::string> only, known;
    bool skip_full_bo = false;
    app.add_option("--only", only, "criterion ids to run (default: all)")->delimiter(',');
    app.add_option("--known-failure", known, "check ids whose failure does not fail the suite")->delimiter(',');
    app.add_flag("--skip-full-bo", skip_full_bo, "skip the 1200-evaluation optimizer run");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Item> criteria = {
        {"1", "ridge readout equals an iterative minimizer", 10, ridge_oracle},
        {"2", "spectral radius of random reservoirs", 30, spectral_radius},
        {"3", "echo-state contraction", 5, echo_state},
        {"4", "integrator order and energy drift", 5, integrator},
        {"5", "forecast reproduction bands", 600, forecast_reproduction},
        {"6", "noise recovery", 180, noise_recovery},
        {"7", "Bayesian re-optimization", 0, [&] { return bo_reoptimization(!skip_full_bo); }},
        {"8", "optimizer mechanics", 120, bo_mechanics},
        {"9", "transfer heatmaps", 1800, heatmap_transfer},
        {"10", "CLI determinism", 0, cli_determinism},
    };

    const std::set<std::string> known_set(known.begin(), known.end());
    int unexpected = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Checks checks;
        try {
            checks = c.run();
        } catch (const std::exception& e) {
            checks = {{c.id + "x", false, std::string("exception: ") + e.what()}};
        }
        const double elapsed = seconds_since(t0);
        if (c.time_limit_s > 0)
            checks.push_back({c.id + "t", elapsed < c.time_limit_s,
                              fmt("runtime %.1f s (limit %.0f s)", elapsed, c.time_limit_s)});

        std::vector<std::string> failed_known, failed_new;
        for (const auto& ch : checks)
            if (!ch.pass) (known_set.count(ch.id) ? failed_known : failed_new).push_back(ch.id);
        unexpected += static_cast<int>(failed_new.size());

        std::string status = failed_known.empty() && failed_new.empty() ? "PASS" : "FAIL";
        std::string note;
        if (failed_new.empty() && !failed_known.empty()) {
            note = " [known failure:";
            for (const auto& id : failed_known) note += " " + id;
            note += "]";
        }
        std::printf("%s  criterion %-2s %s (%.1f s)%s\n", status.c_str(), c.id.c_str(), c.title.c_str(), elapsed,
                    note.c_str());
        for (const auto& ch : checks) {
            const bool noted_pass = ch.pass && known_set.count(ch.id);
            std::printf("      %-4s %-4s %s%s\n", ch.pass ? "ok" : "FAIL", ch.id.c_str(), ch.detail.c_str(),
                        noted_pass ? " (listed as a known failure but passed)" : "");
        }
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
