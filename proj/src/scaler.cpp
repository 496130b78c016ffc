#include "resonant/scaler.hpp"

#include <cmath>

#include "resonant/errors.hpp"

namespace resonant {

AffineScaler::AffineScaler(Eigen::VectorXd shift, Eigen::VectorXd scale)
    : shift_(std::move(shift)), scale_(std::move(scale)) {
    if (shift_.size() != scale_.size())
        throw DimensionMismatch("scaler shift and scale lengths differ");
    for (Eigen::Index i = 0; i < scale_.size(); ++i)
        if (!(scale_[i] != 0.0) || !std::isfinite(scale_[i]) || !std::isfinite(shift_[i]))
            throw InvalidArgument("scaler scale must be finite and nonzero");
}

AffineScaler AffineScaler::fit_min_max(const RowMatrix& y, double margin) {
    if (y.rows() == 0) throw InvalidArgument("cannot fit a scaler on an empty series");
    if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("scaler margin must be in [0, 1)");
    if (!y.allFinite()) throw InvalidArgument("series contains non-finite values");
    const double half = 1.0 - margin;
    Eigen::VectorXd shift(y.cols()), scale(y.cols());
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const double lo = y.col(c).minCoeff();
        const double hi = y.col(c).maxCoeff();
        if (hi > lo) {
            shift[c] = 0.5 * (hi + lo);
            scale[c] = 0.5 * (hi - lo) / half;
        } else {
            shift[c] = 0.0;
            scale[c] = lo == 0.0 ? 1.0 : std::abs(lo) / half;
        }
    }
    return AffineScaler(std::move(shift), std::move(scale));
}

RowMatrix AffineScaler::apply(const RowMatrix& y) const {
    if (y.cols() != channels()) throw DimensionMismatch("scaler channel count mismatch");
    RowMatrix z(y.rows(), y.cols());
    for (Eigen::Index c = 0; c < y.cols(); ++c)
        z.col(c) = (y.col(c).array() - shift_[c]) / scale_[c];
    return z;
}

RowMatrix AffineScaler::inverse(const RowMatrix& z) const {
    if (z.cols() != channels()) throw DimensionMismatch("scaler channel count mismatch");
    RowMatrix y(z.rows(), z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c)
        y.col(c) = z.col(c).array() * scale_[c] + shift_[c];
    return y;
}

Eigen::VectorXd AffineScaler::apply_row(const Eigen::VectorXd& y) const {
    if (y.size() != channels()) throw DimensionMismatch("scaler channel count mismatch");
    return (y - shift_).cwiseQuotient(scale_);
}

Eigen::VectorXd AffineScaler::inverse_row(const Eigen::VectorXd& z) const {
    if (z.size() != channels()) throw DimensionMismatch("scaler channel count mismatch");
    return z.cwiseProduct(scale_) + shift_;
}

}  // namespace resonant
