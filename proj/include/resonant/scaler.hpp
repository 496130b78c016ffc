#pragma once

#include <Eigen/Core>

#include "resonant/reservoir.hpp"

namespace resonant {

/// Per-channel affine map z = (y - shift) / scale.
class AffineScaler {
public:
    AffineScaler() = default;
    AffineScaler(Eigen::VectorXd shift, Eigen::VectorXd scale);

    /// Maps each column's [min, max] onto [-(1 - margin), 1 - margin].
    /// A constant column c maps to sign(c) * (1 - margin) (0 if c == 0).
    static AffineScaler fit_min_max(const RowMatrix& y, double margin = 0.0);

    RowMatrix apply(const RowMatrix& y) const;
    RowMatrix inverse(const RowMatrix& z) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& y) const;
    Eigen::VectorXd inverse_row(const Eigen::VectorXd& z) const;

    Eigen::Index channels() const noexcept { return shift_.size(); }
    const Eigen::VectorXd& shift() const noexcept { return shift_; }
    const Eigen::VectorXd& scale() const noexcept { return scale_; }

private:
    Eigen::VectorXd shift_;
    Eigen::VectorXd scale_;
};

}  // namespace resonant
