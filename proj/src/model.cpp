#include "resonant/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Cholesky>

#include "resonant/errors.hpp"

namespace resonant {

void ReservoirConfig::validate() const {
    hps.validate();
    hybrid.validate();
    if (!is_invertible_output(output_activation))
        throw InvalidArgument("output activation must be identity or tanh");
    if (!(input_scaling > 0.0) || !std::isfinite(input_scaling))
        throw InvalidArgument("input_scaling must be positive");
    if (washout && *washout < 0) throw InvalidArgument("washout must be >= 0");
    if (!(scaler_margin >= 0.0 && scaler_margin < 1.0))
        throw InvalidArgument("scaler_margin must lie in [0, 1)");
}

int default_washout(Eigen::Index n_rows) {
    return static_cast<int>(std::min<Eigen::Index>(100, n_rows / 10));
}

Eigen::MatrixXd ridge_solve(const RowMatrix& design, const RowMatrix& targets, double beta) {
    if (design.rows() != targets.rows())
        throw DimensionMismatch("design and targets need the same number of rows");
    if (design.cols() < 1) throw InvalidArgument("design needs a bias column");
    const auto n = design.cols();
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().head(n - 1).array() += beta;
    const Eigen::MatrixXd rhs = design.transpose() * targets;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    // LDLT skips exactly zero pivots, so its rcond estimate alone misses rank deficiency.
    double rcond = 0.0;
    if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
        const double pivot_ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
        rcond = std::min(ldlt.rcond(), pivot_ratio);
    }
    if (ldlt.info() != Eigen::Success || !(rcond > 1e-14) || !ldlt.isPositive())
        throw IllConditioned("regularized Gram matrix is singular to working precision "
                             "(reciprocal condition estimate " + std::to_string(rcond) +
                                 "); increase regularization",
                             rcond);
    Eigen::MatrixXd solution = ldlt.solve(rhs);
    if (!solution.allFinite())
        throw IllConditioned("ridge solution is not finite", rcond);
    return solution.transpose();
}

RowMatrix training_inputs(const RowMatrix& exogenous_scaled, const RowMatrix& targets_scaled,
                          bool feedback) {
    const auto k = targets_scaled.rows();
    if (exogenous_scaled.rows() != k) throw DimensionMismatch("inputs and targets differ in length");
    if (!feedback) return exogenous_scaled;
    RowMatrix u(k, exogenous_scaled.cols() + targets_scaled.cols());
    u.leftCols(exogenous_scaled.cols()) = exogenous_scaled;
    auto fb = u.rightCols(targets_scaled.cols());
    if (k > 0) fb.row(0).setZero();
    if (k > 1) fb.bottomRows(k - 1) = targets_scaled.topRows(k - 1);
    return u;
}

namespace {

RowMatrix apply_output_rows(Activation g, Direction direction, const RowMatrix& m) {
    if (g == Activation::identity) return m;
    RowMatrix out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        out.row(r) = output_transform(g, direction, m.row(r).transpose()).transpose();
    return out;
}

}  // namespace

FitResult fit_detailed(const ReservoirConfig& config, const RowMatrix* inputs,
                       const RowMatrix& targets) {
    config.validate();
    const auto k = targets.rows();
    if (k < 1 || targets.cols() < 1) throw InvalidArgument("targets must be non-empty");
    if (inputs && inputs->rows() != k)
        throw DimensionMismatch("inputs have " + std::to_string(inputs->rows()) +
                                " rows but targets have " + std::to_string(k));
    if (inputs && inputs->cols() < 1) throw DimensionMismatch("inputs have no channels");
    const int washout = config.washout ? *config.washout : default_washout(k);
    if (washout >= k) throw InvalidArgument("washout leaves no training rows");
    if (2 * k < config.hps.n_nodes)
        std::clog << "warning: " << k << " training rows for " << config.hps.n_nodes
                  << " reservoir nodes; the readout is underdetermined without regularization\n";

    const double margin = has_bounded_range(config.output_activation) ? config.scaler_margin : 0.0;
    AffineScaler target_scaler = AffineScaler::fit_min_max(targets, margin);
    const RowMatrix z = target_scaler.apply(targets);

    std::optional<AffineScaler> input_scaler;
    RowMatrix exogenous;
    if (inputs) {
        input_scaler = AffineScaler::fit_min_max(*inputs, 0.0);
        exogenous = input_scaler->apply(*inputs);
    } else {
        exogenous = RowMatrix::Ones(k, 1);
    }
    const RowMatrix u = training_inputs(exogenous, z, config.feedback);

    BuildOptions build;
    build.mix = config.activation;
    build.hybrid = config.hybrid;
    build.input_scaling = config.input_scaling;
    ReservoirWeights weights =
        build_weights(config.hps, static_cast<int>(u.cols()), config.seed, build);

    const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(weights.n_nodes());
    HiddenStateTrace trace = evolve_states(weights, u, h0, config.hps.leaking_rate);
    trace.washout = washout;

    const RowMatrix transformed = apply_output_rows(config.output_activation, Direction::inverse, z);
    const auto n = weights.n_nodes();
    const auto rows = k - washout;
    RowMatrix design(rows, n + 1);
    design.leftCols(n) = trace.states.bottomRows(rows);
    design.col(n).setOnes();
    const Eigen::MatrixXd coef =
        ridge_solve(design, transformed.bottomRows(rows), config.hps.regularization);

    Readout readout{coef.leftCols(n), coef.col(n)};
    RowMatrix raw = trace.states * readout.w_out.transpose();
    raw.rowwise() += readout.c.transpose();
    const RowMatrix fitted =
        target_scaler.inverse(apply_output_rows(config.output_activation, Direction::forward, raw));

    TrainedModel model{config,
                       weights.with_readout(std::move(readout)),
                       std::move(input_scaler),
                       std::move(target_scaler),
                       trace.states.row(k - 1).transpose(),
                       z.row(k - 1).transpose(),
                       {}};
    return FitResult{std::move(model), fitted, washout};
}

TrainedModel fit(const ReservoirConfig& config, const RowMatrix& targets) {
    return fit_detailed(config, nullptr, targets).model;
}

TrainedModel fit(const ReservoirConfig& config, const RowMatrix& inputs, const RowMatrix& targets) {
    return fit_detailed(config, &inputs, targets).model;
}

RowMatrix predict(const TrainedModel& model, const RowMatrix* inputs, Eigen::Index n_steps) {
    const auto& readout = model.weights.readout();
    if (!readout) throw InvalidArgument("model has no readout; fit it first");
    if (n_steps < 0) throw InvalidArgument("n_steps must be >= 0");
    if (inputs) {
        if (!model.input_scaler)
            throw DimensionMismatch("model was trained without exogenous inputs, got " +
                                    std::to_string(inputs->cols()) + " channels");
        if (inputs->cols() != model.exogenous_dim())
            throw DimensionMismatch("inputs have " + std::to_string(inputs->cols()) +
                                    " channels, model was trained on " +
                                    std::to_string(model.exogenous_dim()));
        if (inputs->rows() != n_steps)
            throw DimensionMismatch("input rows must equal the number of prediction steps");
    } else if (model.input_scaler) {
        throw DimensionMismatch("model was trained with " + std::to_string(model.exogenous_dim()) +
                                " exogenous channels; inputs are required");
    }

    const int p = model.output_dim();
    const int m = model.weights.input_dim();
    const int exo = inputs ? model.exogenous_dim() : 1;
    const double alpha = model.config.hps.leaking_rate;
    const Activation g = model.config.output_activation;

    RowMatrix scaled_inputs;
    if (inputs) scaled_inputs = model.input_scaler->apply(*inputs);

    RowMatrix out(n_steps, p);
    Eigen::VectorXd h = model.final_state;
    Eigen::VectorXd scratch(model.weights.n_nodes());
    Eigen::VectorXd u(m);
    Eigen::VectorXd fed_back = model.final_target;
    Eigen::VectorXd o(p);
    for (Eigen::Index k = 0; k < n_steps; ++k) {
        if (inputs)
            u.head(exo) = scaled_inputs.row(k).transpose();
        else
            u.head(1).setOnes();
        if (model.config.feedback) u.tail(p) = fed_back;
        model.weights.step(u, alpha, h, scratch);
        o.noalias() = readout->w_out * h;
        o += readout->c;
        if (g == Activation::tanh) o = o.array().tanh();
        if (!o.allFinite() || !h.allFinite())
            throw NonFiniteState("prediction became non-finite at step " + std::to_string(k));
        fed_back = o;
        out.row(k) = model.target_scaler.inverse_row(o).transpose();
    }
    return out;
}

RowMatrix predict(const TrainedModel& model, Eigen::Index n_steps) {
    return predict(model, nullptr, n_steps);
}

RowMatrix predict(const TrainedModel& model, const RowMatrix& inputs) {
    return predict(model, &inputs, inputs.rows());
}

Criterion parse_criterion(std::string_view name) {
    if (name == "nmse") return Criterion::nmse;
    if (name == "mse") return Criterion::mse;
    throw InvalidArgument("unknown criterion '" + std::string(name) + "'");
}

std::string_view to_string(Criterion c) { return c == Criterion::nmse ? "nmse" : "mse"; }

double nmse(const RowMatrix& truth, const RowMatrix& prediction) {
    if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols())
        throw DimensionMismatch("truth and prediction shapes differ");
    const double denom = truth.squaredNorm();
    if (!(denom > 0.0)) throw ZeroNormTarget("target has zero norm; NMSE is undefined");
    return (truth - prediction).squaredNorm() / denom;
}

double mse(const RowMatrix& truth, const RowMatrix& prediction) {
    if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols())
        throw DimensionMismatch("truth and prediction shapes differ");
    if (truth.size() == 0) throw ZeroNormTarget("empty target");
    return (truth - prediction).squaredNorm() / static_cast<double>(truth.size());
}

double score(Criterion criterion, const RowMatrix& truth, const RowMatrix& prediction) {
    return criterion == Criterion::nmse ? nmse(truth, prediction) : mse(truth, prediction);
}

TestResult test(const TrainedModel& model, const RowMatrix* inputs, const RowMatrix& truth,
                Criterion criterion) {
    if (truth.cols() != model.output_dim())
        throw DimensionMismatch("target has " + std::to_string(truth.cols()) +
                                " channels, model predicts " + std::to_string(model.output_dim()));
    TestResult result;
    result.prediction = predict(model, inputs, truth.rows());
    result.score = score(criterion, truth, result.prediction);
    return result;
}

}  // namespace resonant
