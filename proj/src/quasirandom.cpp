#include "resonant/quasirandom.hpp"

#include "resonant/errors.hpp"
#include "resonant/random.hpp"

namespace resonant {

ScrambledSobol::ScrambledSobol(int dims, std::uint64_t seed)
    : dims_(dims), engine_(dims > 0 ? static_cast<std::size_t>(dims) : 1) {
    if (dims < 1) throw InvalidArgument("Sobol dimension must be >= 1");
    Rng rng(seed);
    shift_.resize(static_cast<std::size_t>(dims));
    for (auto& s : shift_) s = static_cast<std::uint32_t>(rng() >> 32);
}

RowMatrix ScrambledSobol::draw(Eigen::Index n) {
    RowMatrix out(n, dims_);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool origin = origin_pending_;
        origin_pending_ = false;
        for (int j = 0; j < dims_; ++j) {
            const std::uint32_t raw = origin ? 0u : engine_();
            const std::uint32_t v = raw ^ shift_[static_cast<std::size_t>(j)];
            // Midpoint of the 2^-32 cell keeps draws strictly inside (0, 1).
            out(i, j) = (static_cast<double>(v) + 0.5) * 0x1.0p-32;
        }
    }
    return out;
}

}  // namespace resonant
