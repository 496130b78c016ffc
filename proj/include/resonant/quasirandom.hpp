#pragma once

#include <cstdint>
#include <vector>

#include <boost/random/sobol.hpp>

#include "resonant/reservoir.hpp"

namespace resonant {

/// Sobol sequence with a seeded random digital shift: every coordinate's
/// 32-bit integer is XORed with a per-dimension mask. The shift preserves the
/// net structure, so any prefix of 2^k points stays stratified.
class ScrambledSobol {
public:
    ScrambledSobol(int dims, std::uint64_t seed);

    /// Next `n` points of [0,1)^d, one per row.
    RowMatrix draw(Eigen::Index n);
    int dims() const noexcept { return dims_; }

private:
    int dims_;
    boost::random::sobol_engine<std::uint32_t, 32> engine_;
    std::vector<std::uint32_t> shift_;
    bool origin_pending_ = true;  // the engine starts after the all-zero point
};

}  // namespace resonant
