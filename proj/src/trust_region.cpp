#include "resonant/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resonant/errors.hpp"
#include "resonant/quasirandom.hpp"
#include "resonant/random.hpp"

namespace resonant {

int TurboConstants::failure_tolerance_for(int dims, int batch_size) const {
    if (failure_tolerance > 0) return failure_tolerance;
    return (dims + batch_size - 1) / batch_size;
}

int TurboConstants::candidates_for(int dims) const {
    if (n_candidates > 0) return n_candidates;
    return std::min(100 * dims, 5000);
}

TrustRegionState TrustRegionState::from_initial(std::vector<ScoredPoint> samples, const TurboConstants& c) {
    if (samples.empty()) throw InvalidArgument("an arm needs at least one initial sample");
    TrustRegionState tr;
    tr.length = c.length_init;
    auto best = std::min_element(samples.begin(), samples.end(),
                                 [](const auto& a, const auto& b) { return a.score < b.score; });
    tr.center = best->point;
    tr.best_score = best->score;
    tr.history = std::move(samples);
    return tr;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> candidate_box(const Eigen::VectorXd& center, double length,
                                                          const Eigen::VectorXd& lengthscales) {
    if (lengthscales.size() != center.size()) throw DimensionMismatch("one lengthscale per dimension");
    const Eigen::VectorXd w = lengthscales / lengthscales.maxCoeff();
    const Eigen::VectorXd half = 0.5 * length * w;
    return {(center - half).cwiseMax(0.0), (center + half).cwiseMin(1.0)};
}

RowMatrix generate_candidates(const TrustRegionState& tr, const Eigen::VectorXd& lengthscales,
                              int n_candidates, std::uint64_t seed) {
    const auto d = tr.center.size();
    const auto [lo, hi] = candidate_box(tr.center, tr.length, lengthscales);
    ScrambledSobol sobol(static_cast<int>(d), derive_seed(seed, {0}));
    const RowMatrix raw = sobol.draw(n_candidates);
    Rng rng(derive_seed(seed, {1}));
    const double expected = std::min(static_cast<double>(d), 20.0 * std::min(1.0, tr.length));
    const double prob = expected / static_cast<double>(d);

    RowMatrix out(n_candidates, d);
    for (Eigen::Index i = 0; i < n_candidates; ++i) {
        out.row(i) = tr.center.transpose();
        bool any = false;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (uniform01(rng) < prob) {
                out(i, j) = lo[j] + (hi[j] - lo[j]) * raw(i, j);
                any = true;
            }
        }
        if (!any) {
            const auto j = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(d)));
            out(i, j) = lo[j] + (hi[j] - lo[j]) * raw(i, j);
        }
    }
    return out;
}

RowMatrix thompson_select(const GaussianProcess& gp, const RowMatrix& candidates, int batch_size,
                          std::uint64_t seed) {
    if (batch_size < 1 || batch_size > candidates.rows())
        throw InvalidArgument("batch size must lie in [1, number of candidates]");
    Rng rng(seed);
    const Eigen::VectorXd draw = gp.sample(candidates, rng);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(candidates.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::partial_sort(order.begin(), order.begin() + batch_size, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return draw[a] < draw[b] || (draw[a] == draw[b] && a < b); });
    RowMatrix batch(batch_size, candidates.cols());
    for (int i = 0; i < batch_size; ++i) batch.row(i) = candidates.row(order[static_cast<std::size_t>(i)]);
    return batch;
}

RowMatrix propose(const TrustRegionState& tr, const GaussianProcess& gp, int n_candidates, int batch_size,
                  std::uint64_t seed) {
    const RowMatrix candidates =
        generate_candidates(tr, gp.hyper().lengthscales, std::max(n_candidates, batch_size), derive_seed(seed, {0}));
    return thompson_select(gp, candidates, batch_size, derive_seed(seed, {1}));
}

TrustRegionState update_region(TrustRegionState tr, const std::vector<ScoredPoint>& batch,
                               const TurboConstants& c, int batch_size) {
    if (batch.empty()) return tr;
    const auto best = std::min_element(batch.begin(), batch.end(),
                                       [](const auto& a, const auto& b) { return a.score < b.score; });
    const bool improved = best->score < tr.best_score - c.improvement_rel * std::abs(tr.best_score);
    if (improved) {
        ++tr.success_count;
        tr.failure_count = 0;
    } else {
        tr.success_count = 0;
        ++tr.failure_count;
    }
    if (tr.success_count == c.success_tolerance) {
        tr.length = std::min(2.0 * tr.length, c.length_max);
        tr.success_count = 0;
    } else if (tr.failure_count == c.failure_tolerance_for(static_cast<int>(tr.center.size()), batch_size)) {
        tr.length /= 2.0;
        tr.failure_count = 0;
    }
    if (best->score < tr.best_score) {
        tr.best_score = best->score;
        tr.center = best->point;
    }
    tr.history.insert(tr.history.end(), batch.begin(), batch.end());
    return tr;
}

}  // namespace resonant
