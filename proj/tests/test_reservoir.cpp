#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "resonant/errors.hpp"
#include "resonant/random.hpp"
#include "resonant/reservoir.hpp"

using namespace resonant;

namespace {

HyperParams paper_pure_prediction_hps() {
    HyperParams h;
    h.n_nodes = 202;
    h.spectral_radius = 1.1329107284545898;
    h.connectivity = 0.4071449746896983;
    h.leaking_rate = 0.009808523580431938;
    h.bias = 0.48509588837623596;
    h.regularization = 1.6862021450927922;
    return h;
}

RowMatrix random_inputs(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrix u(rows, cols);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = uniform(rng, -1.0, 1.0);
    return u;
}

}  // namespace

TEST_CASE("hyper-parameter validation") {
    HyperParams h;
    CHECK_NOTHROW(h.validate());
    auto bad = h;
    bad.connectivity = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = h;
    bad.connectivity = 1.2;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = h;
    bad.leaking_rate = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = h;
    bad.regularization = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = h;
    bad.spectral_radius = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = h;
    bad.n_nodes = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("paper hyper-parameters give the requested spectral radius") {
    const auto hps = paper_pure_prediction_hps();
    const auto w = build_weights(hps, 1, 210);
    CHECK(w.n_nodes() == 202);
    const double radius = oracle::dense_radius(w.w_res());
    CHECK(std::abs(radius - 1.13291) <= 1e-4 * 1.13291 + 1e-5);
    CHECK(std::abs(radius - hps.spectral_radius) <= 1e-4 * hps.spectral_radius);
}

TEST_CASE("single-node reservoir") {
    HyperParams h;
    h.n_nodes = 1;
    h.connectivity = 1.0;
    h.spectral_radius = 0.5;
    const auto w = build_weights(h, 1, 0);
    CHECK(w.w_res().nonZeros() == 1);
    CHECK(std::abs(w.w_res().coeff(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("power iteration agrees with the dense eigensolver") {
    HyperParams h;
    h.n_nodes = 50;
    h.connectivity = 0.2;
    h.spectral_radius = 0.9;
    const auto w = build_weights(h, 1, 7);
    CHECK(std::abs(oracle::dense_radius(w.w_res()) - 0.9) < 1e-6);

    // Unscaled random matrices of several sizes and densities.
    for (int trial = 0; trial < 12; ++trial) {
        Rng rng(100 + trial);
        const int n = 10 + static_cast<int>(uniform_index(rng, 80));
        SparseRowMatrix a(n, n);
        std::vector<Eigen::Triplet<double>> t;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (uniform01(rng) < 0.3) t.emplace_back(i, j, uniform(rng, -1.0, 1.0));
        a.setFromTriplets(t.begin(), t.end());
        PowerIterationOptions opt;
        opt.dense_fallback = true;
        const auto est = estimate_spectral_radius(a, opt);
        const double exact = oracle::dense_radius(a);
        CHECK(std::abs(est.magnitude - exact) <= 1e-5 * exact);
    }
}

TEST_CASE("adjacency density matches connectivity") {
    for (double zeta : {0.05, 0.2, 0.4071449746896983, 1.0}) {
        HyperParams h;
        h.n_nodes = 80;
        h.connectivity = zeta;
        const auto w = build_weights(h, 2, 13);
        const double frac = static_cast<double>(w.w_res().nonZeros()) / (80.0 * 80.0);
        CHECK(std::abs(frac - zeta) <= 1.0 / 80.0);
    }
}

TEST_CASE("construction is deterministic and seed-sensitive") {
    HyperParams h;
    h.n_nodes = 30;
    h.connectivity = 0.3;
    const auto a = build_weights(h, 3, 42);
    const auto b = build_weights(h, 3, 42);
    const auto c = build_weights(h, 3, 43);
    CHECK(a.w_in() == b.w_in());
    CHECK(Eigen::MatrixXd(a.w_res()) == Eigen::MatrixXd(b.w_res()));
    CHECK(a.w_in() != c.w_in());
    CHECK((a.b().array() == h.bias).all());
    CHECK(a.w_in().cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("empty adjacency is a singular spectrum") {
    HyperParams h;
    h.n_nodes = 2;
    h.connectivity = 0.1;  // 0.4 nonzeros rounds to zero
    CHECK_THROWS_AS(build_weights(h, 1, 0), SingularSpectrum);
}

TEST_CASE("evolve_states edge cases") {
    HyperParams h;
    h.n_nodes = 6;
    h.connectivity = 0.5;
    const auto w = build_weights(h, 2, 4);
    const RowMatrix u = random_inputs(10, 2, 1);

    SUBCASE("zero leaking rate freezes the state") {
        Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(6, -0.3, 0.4);
        const auto trace = evolve_states(w, u, v, 0.0);
        for (Eigen::Index k = 0; k < u.rows(); ++k) CHECK(trace.states.row(k).transpose() == v);
    }
    SUBCASE("identity reservoir copies its input") {
        SparseRowMatrix zero(3, 3);
        ReservoirWeights copy(Eigen::MatrixXd::Identity(3, 3), zero, Eigen::VectorXd::Zero(3),
                              std::vector<Activation>(3, Activation::identity));
        const RowMatrix in = random_inputs(7, 3, 2);
        const auto trace = evolve_states(copy, in, Eigen::VectorXd::Zero(3), 1.0);
        CHECK(trace.states == in);
    }
    SUBCASE("shape errors") {
        CHECK_THROWS_AS(evolve_states(w, random_inputs(4, 3, 1), Eigen::VectorXd::Zero(6), 0.5),
                        DimensionMismatch);
        CHECK_THROWS_AS(evolve_states(w, u, Eigen::VectorXd::Zero(5), 0.5), DimensionMismatch);
    }
}

TEST_CASE("evolve_states matches the scalar-loop recurrence") {
    HyperParams h;
    h.n_nodes = 3;
    h.connectivity = 1.0;
    h.spectral_radius = 0.8;
    h.bias = 0.2;
    const auto w = build_weights(h, 2, 1);
    const RowMatrix u = random_inputs(5, 2, 1);
    Eigen::VectorXd h0(3);
    h0 << 0.1, -0.2, 0.3;
    const auto trace = evolve_states(w, u, h0, 0.7);
    const RowMatrix expected = oracle::scalar_loop_states(w, u, h0, 0.7);
    CHECK((trace.states - expected).cwiseAbs().maxCoeff() < 1e-12);

    BuildOptions mixed;
    mixed.mix = ActivationMix({{Activation::tanh, 1}, {Activation::relu, 1}, {Activation::sin, 1},
                               {Activation::hybrid_relu_tanh, 1}});
    HyperParams big = h;
    big.n_nodes = 25;
    big.connectivity = 0.3;
    const auto wm = build_weights(big, 2, 8, mixed);
    const RowMatrix um = random_inputs(40, 2, 3);
    const auto tm = evolve_states(wm, um, Eigen::VectorXd::Zero(25), 0.4);
    CHECK((tm.states - oracle::scalar_loop_states(wm, um, Eigen::VectorXd::Zero(25), 0.4))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("echo-state contraction") {
    HyperParams h;
    h.n_nodes = 100;
    h.connectivity = 0.1;
    h.spectral_radius = 0.8;
    h.leaking_rate = 1.0;
    const auto w = build_weights(h, 1, 21);
    const RowMatrix u = random_inputs(500, 1, 22);
    Rng rng(23);
    Eigen::VectorXd h0(100);
    for (auto& x : h0) x = uniform(rng, -1.0, 1.0);
    const auto a = evolve_states(w, u, Eigen::VectorXd::Zero(100), 1.0);
    const auto b = evolve_states(w, u, h0, 1.0);
    CHECK((a.states.row(499) - b.states.row(499)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("unstable reservoir reports a non-finite state") {
    HyperParams h;
    h.n_nodes = 20;
    h.connectivity = 0.5;
    h.spectral_radius = 50.0;
    BuildOptions opt;
    opt.mix = ActivationMix(Activation::identity);
    const auto w = build_weights(h, 1, 3, opt);
    const RowMatrix u = RowMatrix::Ones(2000, 1);
    CHECK_THROWS_AS(evolve_states(w, u, Eigen::VectorXd::Zero(20), 1.0), NonFiniteState);
}
