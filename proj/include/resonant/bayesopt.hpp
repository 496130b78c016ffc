#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "resonant/bounds.hpp"
#include "resonant/errors.hpp"
#include "resonant/gp.hpp"
#include "resonant/model.hpp"
#include "resonant/trust_region.hpp"

namespace resonant {

/// Score assigned to candidates whose reservoir diverged or whose readout
/// could not be solved.
inline constexpr double kPenaltyScore = 1e6;
/// Offset inside the log transform applied to scores before GP fitting.
inline constexpr double kLogScoreOffset = 1e-9;

/// Data and fixed settings for scoring one hyper-parameter candidate.
struct ObjectiveConfig {
    /// Everything except hps, which each candidate overrides.
    ReservoirConfig base;
    RowMatrix targets;
    std::optional<RowMatrix> inputs;
    /// Trailing fraction of the rows held out for scoring.
    double validation_fraction = 0.3;
    Criterion criterion = Criterion::nmse;

    void validate() const;
};

/// Fits on the leading rows and scores the forecast of the trailing
/// validation rows. Divergence and solver failure map to kPenaltyScore.
double objective_eval(const HyperParams& hps, const ObjectiveConfig& config);

struct OptimizeOptions {
    int n_trust_regions = 6;
    int max_evals = 1200;
    int initial_samples = 10;
    int batch_size = 1;
    std::uint64_t seed = 0;
    /// 0 means worker_count().
    int workers = 0;
    TurboConstants turbo;
    GpFitOptions gp;

    void validate() const;
};

struct Trial {
    int eval_index = 0;
    int arm = 0;
    /// Arm edge length when the point was proposed.
    double length = 0.0;
    Eigen::VectorXd point;
    double score = 0.0;
    double wall_ms = 0.0;
};

struct OptimizeResult {
    std::vector<Trial> trials;  // ordered by eval_index
    Trial best;
    /// Best score after each evaluation; non-increasing.
    std::vector<double> incumbent;
};

class AllDiverged : public Error {
public:
    explicit AllDiverged(OptimizeResult result)
        : Error("every evaluation diverged; the bounds admit no stable reservoir"),
          result_(std::move(result)) {}
    const OptimizeResult& result() const noexcept { return result_; }

private:
    OptimizeResult result_;
};

using PointObjective = std::function<double(const Eigen::VectorXd&)>;
/// Receives the trials of each completed round, in eval_index order.
using RoundCallback = std::function<void(const std::vector<Trial>&)>;

/// Trust-region Bayesian minimization over [0,1]^dims. Rounds propose one
/// batch per arm, evaluate the batches concurrently and merge them by
/// (arm, candidate index), so the trial sequence depends only on the seed.
/// Trials in `replay` (a previous run's log prefix) supply their logged
/// scores instead of calling the objective; a replayed point that differs
/// from the regenerated one throws InvalidArgument.
OptimizeResult optimize_unit_cube(int dims, const PointObjective& objective, const OptimizeOptions& opts,
                                  const std::vector<Trial>& replay = {}, const RoundCallback& on_round = {});

/// Reservoir hyper-parameter search. Throws AllDiverged when every
/// evaluation hit the penalty.
OptimizeResult optimize(const BoundsSpec& bounds, const ObjectiveConfig& objective, const OptimizeOptions& opts,
                        const std::vector<Trial>& replay = {}, const RoundCallback& on_round = {});

/// Trial log: eval_index, arm, L, u_<coordinate>..., decoded hyper-parameters,
/// score, wall_ms. Timings are written as 0 unless `timing` is set, which
/// keeps logs byte-identical across reruns.
void write_trial_log_header(std::ostream& out, const BoundsSpec& bounds);
void write_trial_log_rows(std::ostream& out, const BoundsSpec& bounds, const std::vector<Trial>& trials,
                          bool timing);
std::vector<Trial> read_trial_log(const std::filesystem::path& path, const BoundsSpec& bounds);

}  // namespace resonant
