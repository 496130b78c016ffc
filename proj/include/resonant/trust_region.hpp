#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "resonant/gp.hpp"
#include "resonant/reservoir.hpp"

namespace resonant {

struct TurboConstants {
    double length_init = 0.8;
    double length_min = 0.0078125;  // 2^-7
    double length_max = 1.6;
    int success_tolerance = 3;
    /// 0 selects ceil(d / batch_size).
    int failure_tolerance = 0;
    /// 0 selects min(100 d, 5000).
    int n_candidates = 0;
    /// A batch improves the incumbent when it beats best - rel * |best|.
    double improvement_rel = 1e-3;

    int failure_tolerance_for(int dims, int batch_size) const;
    int candidates_for(int dims) const;
};

struct ScoredPoint {
    Eigen::VectorXd point;
    double score = 0.0;
};

/// One arm: a hyper-rectangle around the arm's incumbent.
struct TrustRegionState {
    Eigen::VectorXd center;
    double length = 0.8;
    int success_count = 0;
    int failure_count = 0;
    double best_score = 0.0;
    /// Evaluations since the arm's last restart.
    std::vector<ScoredPoint> history;

    /// Arm seeded with its initial design; the center is the best sample.
    static TrustRegionState from_initial(std::vector<ScoredPoint> samples, const TurboConstants& c);
};

/// Candidate box center +- L w / 2 clipped to the unit cube, where the
/// weights w are lengthscales divided by their maximum (so w <= 1).
std::pair<Eigen::VectorXd, Eigen::VectorXd> candidate_box(const Eigen::VectorXd& center, double length,
                                                          const Eigen::VectorXd& lengthscales);

/// Quasi-random candidates in the box with a coordinate-perturbation mask
/// whose expected count of perturbed coordinates is min(d, 20 min(1, L));
/// each candidate perturbs at least one coordinate.
RowMatrix generate_candidates(const TrustRegionState& tr, const Eigen::VectorXd& lengthscales,
                              int n_candidates, std::uint64_t seed);

/// Thompson sampling: one joint posterior draw, the batch_size smallest rows.
RowMatrix thompson_select(const GaussianProcess& gp, const RowMatrix& candidates, int batch_size,
                          std::uint64_t seed);

RowMatrix propose(const TrustRegionState& tr, const GaussianProcess& gp, int n_candidates, int batch_size,
                  std::uint64_t seed);

/// Success/failure bookkeeping after a batch. The returned length may fall
/// below length_min, which tells the caller to restart the arm.
TrustRegionState update_region(TrustRegionState tr, const std::vector<ScoredPoint>& batch,
                               const TurboConstants& c, int batch_size);

inline bool needs_restart(const TrustRegionState& tr, const TurboConstants& c) {
    return tr.length < c.length_min;
}

}  // namespace resonant
