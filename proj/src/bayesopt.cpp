#include "resonant/bayesopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "resonant/parallel.hpp"
#include "resonant/quasirandom.hpp"
#include "resonant/random.hpp"
#include "resonant/series_io.hpp"

namespace resonant {

void ObjectiveConfig::validate() const {
    base.validate();
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw InvalidArgument("validation fraction must lie in (0, 1)");
    if (inputs && inputs->rows() != targets.rows())
        throw DimensionMismatch("objective inputs and targets differ in length");
    const auto k = targets.rows();
    const auto n_train = static_cast<Eigen::Index>(std::floor(static_cast<double>(k) * (1.0 - validation_fraction)));
    if (n_train < 2 || n_train >= k) throw InvalidArgument("too few rows for a train/validation split");
}

double objective_eval(const HyperParams& hps, const ObjectiveConfig& config) {
    const auto k = config.targets.rows();
    const auto n_train =
        static_cast<Eigen::Index>(std::floor(static_cast<double>(k) * (1.0 - config.validation_fraction)));
    ReservoirConfig cfg = config.base;
    cfg.hps = hps;
    double s;
    try {
        const RowMatrix y_train = config.targets.topRows(n_train);
        const RowMatrix y_val = config.targets.bottomRows(k - n_train);
        if (config.inputs) {
            const RowMatrix x_train = config.inputs->topRows(n_train);
            const RowMatrix x_val = config.inputs->bottomRows(k - n_train);
            s = test(fit(cfg, x_train, y_train), &x_val, y_val, config.criterion).score;
        } else {
            s = test(fit(cfg, y_train), nullptr, y_val, config.criterion).score;
        }
    } catch (const NonFiniteState&) {
        return kPenaltyScore;
    } catch (const IllConditioned&) {
        return kPenaltyScore;
    } catch (const SingularSpectrum&) {
        return kPenaltyScore;
    } catch (const OutOfRange&) {
        return kPenaltyScore;
    }
    if (!std::isfinite(s) || s > kPenaltyScore) return kPenaltyScore;
    return s;
}

void OptimizeOptions::validate() const {
    if (n_trust_regions < 1) throw InvalidArgument("n_trust_regions must be >= 1");
    if (initial_samples < 1) throw InvalidArgument("initial_samples must be >= 1");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (max_evals < n_trust_regions * initial_samples)
        throw InvalidArgument("max_evals must be at least n_trust_regions * initial_samples (" +
                              std::to_string(n_trust_regions * initial_samples) + ")");
    if (!(turbo.length_min > 0.0 && turbo.length_min <= turbo.length_init && turbo.length_init <= turbo.length_max))
        throw InvalidArgument("trust-region lengths need 0 < L_min <= L_init <= L_max");
    if (turbo.success_tolerance < 1) throw InvalidArgument("success tolerance must be >= 1");
}

namespace {

struct Arm {
    std::optional<TrustRegionState> state;  // empty until (re)initialized
    int restarts = 0;
    std::optional<GpHyper> last_hyper;
};

struct Request {
    int arm;
    double length;
    Eigen::VectorXd point;
};

RowMatrix stack_points(const std::vector<ScoredPoint>& h) {
    RowMatrix x(static_cast<Eigen::Index>(h.size()), h.front().point.size());
    for (std::size_t i = 0; i < h.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = h[i].point.transpose();
    return x;
}

/// Proposals of one arm for one round.
std::vector<Request> arm_requests(Arm& arm, int a, int dims, int round, const OptimizeOptions& opts) {
    std::vector<Request> out;
    if (!arm.state) {
        ScrambledSobol sobol(dims, derive_seed(opts.seed, {static_cast<std::uint64_t>(a),
                                                           static_cast<std::uint64_t>(arm.restarts), 0x5b}));
        const RowMatrix pts = sobol.draw(opts.initial_samples);
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            out.push_back({a, opts.turbo.length_init, pts.row(i).transpose()});
        return out;
    }
    const auto& tr = *arm.state;
    const std::uint64_t round_seed =
        derive_seed(opts.seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(round), 0x9f});
    const int n_cand = opts.turbo.candidates_for(dims);
    RowMatrix batch;
    try {
        const RowMatrix x = stack_points(tr.history);
        Eigen::VectorXd y(x.rows());
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y[i] = std::log(tr.history[static_cast<std::size_t>(i)].score + kLogScoreOffset);
        GpFitOptions gopts = opts.gp;
        gopts.seed = derive_seed(round_seed, {0});
        gopts.warm_start = arm.last_hyper;
        const auto gp = GaussianProcess::fit(x, y, gopts);
        arm.last_hyper = gp.hyper();
        batch = propose(tr, gp, n_cand, opts.batch_size, derive_seed(round_seed, {1}));
    } catch (const DegenerateData&) {
        batch = generate_candidates(tr, Eigen::VectorXd::Ones(dims), opts.batch_size, derive_seed(round_seed, {2}));
    } catch (const IllConditioned&) {
        batch = generate_candidates(tr, Eigen::VectorXd::Ones(dims), opts.batch_size, derive_seed(round_seed, {2}));
    }
    for (Eigen::Index i = 0; i < batch.rows(); ++i) out.push_back({a, tr.length, batch.row(i).transpose()});
    return out;
}

}  // namespace

OptimizeResult optimize_unit_cube(int dims, const PointObjective& objective, const OptimizeOptions& opts,
                                  const std::vector<Trial>& replay, const RoundCallback& on_round) {
    opts.validate();
    if (dims < 1) throw InvalidArgument("search space needs at least one dimension");
    const int workers = opts.workers > 0 ? opts.workers : worker_count();

    std::vector<Arm> arms(static_cast<std::size_t>(opts.n_trust_regions));
    OptimizeResult result;
    double best = std::numeric_limits<double>::infinity();

    for (int round = 0; static_cast<int>(result.trials.size()) < opts.max_evals; ++round) {
        // Arms propose independently; each owns its GP and random streams.
        std::vector<std::vector<Request>> per_arm(arms.size());
        parallel_for(arms.size(), workers, [&](std::size_t a) {
            per_arm[a] = arm_requests(arms[a], static_cast<int>(a), dims, round, opts);
        });

        std::vector<Request> requests;
        for (auto& r : per_arm) requests.insert(requests.end(), r.begin(), r.end());
        const auto remaining = static_cast<std::size_t>(opts.max_evals - static_cast<int>(result.trials.size()));
        if (requests.size() > remaining) requests.resize(remaining);

        const int first_index = static_cast<int>(result.trials.size());
        std::vector<Trial> batch(requests.size());
        parallel_for(requests.size(), workers, [&](std::size_t i) {
            Trial& t = batch[i];
            t.eval_index = first_index + static_cast<int>(i);
            t.arm = requests[i].arm;
            t.length = requests[i].length;
            t.point = requests[i].point;
            const auto e = static_cast<std::size_t>(t.eval_index);
            if (e < replay.size()) {
                const Trial& logged = replay[e];
                if (logged.arm != t.arm || logged.point.size() != t.point.size() ||
                    (logged.point - t.point).cwiseAbs().maxCoeff() > 1e-12)
                    throw InvalidArgument("trial log row " + std::to_string(e) +
                                          " does not match this configuration; resume needs the same "
                                          "bounds, data, seed and optimizer settings");
                t.score = logged.score;
                t.wall_ms = logged.wall_ms;
                return;
            }
            const auto start = std::chrono::steady_clock::now();
            t.score = objective(t.point);
            t.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        });

        // Serial merge in (arm, candidate index) order.
        for (std::size_t a = 0; a < arms.size(); ++a) {
            std::vector<ScoredPoint> scored;
            for (const auto& t : batch)
                if (t.arm == static_cast<int>(a)) scored.push_back({t.point, t.score});
            if (scored.empty()) continue;
            auto& arm = arms[a];
            if (!arm.state) {
                arm.state = TrustRegionState::from_initial(std::move(scored), opts.turbo);
            } else {
                arm.state = update_region(std::move(*arm.state), scored, opts.turbo, opts.batch_size);
                if (needs_restart(*arm.state, opts.turbo)) {
                    arm.state.reset();
                    arm.last_hyper.reset();
                    ++arm.restarts;
                }
            }
        }
        for (const auto& t : batch) {
            if (t.score < best) {
                best = t.score;
                result.best = t;
            }
            result.incumbent.push_back(best);
            result.trials.push_back(t);
        }
        if (on_round) on_round(batch);
    }
    return result;
}

OptimizeResult optimize(const BoundsSpec& bounds, const ObjectiveConfig& objective, const OptimizeOptions& opts,
                        const std::vector<Trial>& replay, const RoundCallback& on_round) {
    objective.validate();
    auto f = [&](const Eigen::VectorXd& u) { return objective_eval(bounds.decode(u), objective); };
    OptimizeResult result = optimize_unit_cube(bounds.dims(), f, opts, replay, on_round);
    const bool all_diverged = std::all_of(result.trials.begin(), result.trials.end(),
                                          [](const Trial& t) { return t.score >= kPenaltyScore; });
    if (all_diverged) throw AllDiverged(std::move(result));
    return result;
}

namespace {

constexpr const char* kHpColumns[] = {"n_nodes", "spectral_radius", "connectivity",
                                      "leaking_rate", "bias", "regularization"};

}  // namespace

void write_trial_log_header(std::ostream& out, const BoundsSpec& bounds) {
    out << "eval_index,arm,L";
    for (const auto& c : bounds.coordinates()) out << ",u_" << c.name;
    for (const char* h : kHpColumns) out << ',' << h;
    out << ",score,wall_ms\n";
}

void write_trial_log_rows(std::ostream& out, const BoundsSpec& bounds, const std::vector<Trial>& trials,
                          bool timing) {
    for (const auto& t : trials) {
        out << t.eval_index << ',' << t.arm << ',' << format_double(t.length);
        for (Eigen::Index i = 0; i < t.point.size(); ++i) out << ',' << format_double(t.point[i]);
        const HyperParams h = bounds.decode(t.point);
        out << ',' << h.n_nodes << ',' << format_double(h.spectral_radius) << ',' << format_double(h.connectivity)
            << ',' << format_double(h.leaking_rate) << ',' << format_double(h.bias) << ','
            << format_double(h.regularization);
        out << ',' << format_double(t.score) << ',' << format_double(timing ? t.wall_ms : 0.0) << '\n';
    }
    out.flush();
}

std::vector<Trial> read_trial_log(const std::filesystem::path& path, const BoundsSpec& bounds) {
    const Series s = read_csv(path);
    std::vector<std::string> coord_cols;
    for (const auto& c : bounds.coordinates()) coord_cols.push_back("u_" + c.name);
    RowMatrix meta, coords;
    try {
        meta = s.select({"eval_index", "arm", "L", "score", "wall_ms"});
        coords = s.select(coord_cols);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("trial log '" + path.string() + "' does not match the bounds: " + e.what());
    }
    std::vector<Trial> trials;
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        Trial t;
        t.eval_index = static_cast<int>(meta(r, 0));
        if (t.eval_index != static_cast<int>(r))
            throw InvalidArgument("trial log '" + path.string() + "' is not ordered by eval_index");
        t.arm = static_cast<int>(meta(r, 1));
        t.length = meta(r, 2);
        t.score = meta(r, 3);
        t.wall_ms = meta(r, 4);
        t.point = coords.row(r).transpose();
        trials.push_back(std::move(t));
    }
    return trials;
}

}  // namespace resonant
