#include <cmath>
#include <string>

#include "cli_harness.hpp"
#include "doctest.h"
#include "resonant/bayesopt.hpp"
#include "resonant/model_io.hpp"
#include "resonant/series_io.hpp"

using namespace resonant;
using cli_harness::read_file;
using cli_harness::run;
using cli_harness::TempDir;
using cli_harness::write_file;

namespace {

/// Trajectory split into train/test CSVs plus matching force series.
void make_data(const TempDir& d, int steps = 3000) {
    REQUIRE(run("generate-data --amp 0.5 --freq 0.2 --steps " + std::to_string(steps) + " --out " + d / "traj.csv" +
                " --force-out " + d / "f.csv" + " --split 0.2") == 0);
    write_file(d / "hps.json", cli_harness::kReferenceHps);
}

std::string small_bounds(const TempDir& d) {
    write_file(d / "bounds.toml",
               "log_connectivity = [-2, -0.1]\nspectral_radius = [0.6, 2]\nn_nodes = [30, 33]\n"
               "log_regularization = [-3, 3]\nleaking_rate = [0, 1]\nbias = [0, 1]\n");
    return d / "bounds.toml";
}

}  // namespace

TEST_CASE("generate-data writes trajectory, sidecar and split") {
    TempDir d("cli_gen");
    make_data(d);
    const Series full = read_csv(d / "traj.csv");
    CHECK(full.columns == std::vector<std::string>{"t", "x", "p"});
    CHECK(full.rows() == 3000);
    CHECK(read_csv(d / "traj.train.csv").rows() == 600);
    CHECK(read_csv(d / "traj.test.csv").rows() == 2400);
    const auto meta = read_json_file(d / "traj.csv.json");
    CHECK(meta.at("force").at("frequency").get<double>() == 0.2);
    CHECK(meta.at("run_config").at("command") == "generate-data");
    const auto traj = read_trajectory(d / "traj.csv");
    CHECK(traj.dt == full.data(1, 0) - full.data(0, 0));
    CHECK(run("generate-data --steps 10 --split 1.5 --out " + d / "bad.csv") == 2);
    CHECK(run("generate-data --force cosine --out " + d / "bad.csv") == 2);
}

TEST_CASE("fit embeds the hyper-parameters; test matches the library") {
    TempDir d("cli_fit");
    make_data(d);
    REQUIRE(run("fit --hps " + d / "hps.json" + " --target " + d / "traj.train.csv" +
                " --feedback --seed 210 --out " + d / "model.json") == 0);
    const auto doc = read_json_file(d / "model.json");
    CHECK(doc.at("hyperparams").at("n_nodes") == 202);
    CHECK(doc.at("hyperparams").at("leaking_rate").get<double>() == 0.009808523580431938);
    CHECK(doc.at("run_config").at("command") == "fit");

    REQUIRE(run("test --model " + d / "model.json" + " --target " + d / "traj.test.csv" + " --out " +
                d / "score.json" + " --prediction-out " + d / "cmp.csv") == 0);
    const double cli_score = read_json_file(d / "score.json").at("score").get<double>();
    const TrainedModel model = load_model(d / "model.json");
    const RowMatrix truth = value_columns(read_csv(d / "traj.test.csv")).data;
    const TestResult lib = test(model, nullptr, truth, Criterion::nmse);
    CHECK(cli_score == lib.score);
    const Series cmp = read_csv(d / "cmp.csv");
    CHECK(cmp.select({"x_pred", "p_pred"}) == lib.prediction);

    REQUIRE(run("predict --model " + d / "model.json" + " --steps 0 --out " + d / "empty.csv") == 0);
    const Series empty = read_csv(d / "empty.csv");
    CHECK(empty.rows() == 0);
    CHECK(empty.columns == std::vector<std::string>{"k", "x_pred", "p_pred"});

    REQUIRE(run("predict --model " + d / "model.json" + " --steps 25 --out " + d / "pred.csv") == 0);
    CHECK(read_csv(d / "pred.csv").select({"x_pred", "p_pred"}) == predict(model, 25));
}

TEST_CASE("parameter-aware fit through the cli") {
    TempDir d("cli_aware");
    make_data(d);
    REQUIRE(run("fit --hps " + d / "hps.json" + " --target " + d / "traj.train.csv" + " --input " +
                d / "f.train.csv" + " --feedback --seed 210 --out " + d / "model.json") == 0);
    REQUIRE(run("test --model " + d / "model.json" + " --target " + d / "traj.test.csv" + " --input " +
                d / "f.test.csv" + " --out " + d / "score.json") == 0);
    const TrainedModel model = load_model(d / "model.json");
    const RowMatrix f = value_columns(read_csv(d / "f.test.csv")).data;
    const RowMatrix truth = value_columns(read_csv(d / "traj.test.csv")).data;
    CHECK(read_json_file(d / "score.json").at("score").get<double>() == test(model, &f, truth).score);
    // Exogenous model without inputs.
    CHECK(run("test --model " + d / "model.json" + " --target " + d / "traj.test.csv" + " --out " +
              d / "s2.json") == 2);
}

TEST_CASE("exit codes") {
    TempDir d("cli_exit");
    make_data(d, 500);
    CHECK(run("fit --hps " + d / "missing.json" + " --target " + d / "traj.csv --out " + d / "m.json") == 2);
    CHECK(run("fit --target " + d / "traj.csv --out " + d / "m.json") == 2);
    write_file(d / "badhps.json", R"({"n_nodes": 10, "spectral_radius": 1, "connectivity": 2, "leaking_rate": 1,)"
                                  R"( "bias": 0, "regularization": 1})");
    CHECK(run("fit --hps " + d / "badhps.json" + " --target " + d / "traj.csv --out " + d / "m.json") == 2);
    CHECK(run("fit --hps " + d / "hps.json") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("plot --kind pie --in " + d / "traj.csv --out " + d / "p.svg") == 2);

    // An all-zero target cannot be scored by NMSE: a runtime failure.
    REQUIRE(run("fit --hps " + d / "hps.json" + " --target " + d / "traj.csv --out " + d / "m.json") == 0);
    write_file(d / "zeros.csv", "x,p\n0,0\n0,0\n0,0\n");
    CHECK(run("test --model " + d / "m.json" + " --target " + d / "zeros.csv --out " + d / "s.json") == 1);
}

TEST_CASE("optimize respects the budget and maps total divergence to exit 3") {
    TempDir d("cli_opt");
    make_data(d);
    const std::string bounds = small_bounds(d);
    REQUIRE(run("optimize --bounds " + bounds + " --target " + d / "traj.train.csv" +
                " --feedback --n-trust-regions 2 --max-evals 23 --initial-samples 5 --out " + d / "best.json" +
                " --log " + d / "trials.csv") == 0);
    const Series log = read_csv(d / "trials.csv");
    CHECK(log.rows() == 23);
    const auto best = read_json_file(d / "best.json");
    const RowMatrix score = log.select({"score"});
    CHECK(best.at("score").get<double>() == score.minCoeff());
    CHECK(log.select({"wall_ms"}).cwiseAbs().maxCoeff() == 0.0);

    write_file(d / "wild.toml", "spectral_radius = [50, 60]\nleaking_rate = 1.0\nn_nodes = 30\n"
                                "connectivity = 0.5\nlog_regularization = [-3, 0]\n");
    CHECK(run("optimize --bounds " + d / "wild.toml" + " --target " + d / "traj.train.csv" +
              " --activation relu --n-trust-regions 2 --max-evals 12 --initial-samples 3 --out " + d / "b2.json" +
              " --log " + d / "wild.csv") == 3);
    const Series wild = read_csv(d / "wild.csv");
    CHECK(wild.rows() == 12);
    CHECK(wild.select({"score"}).minCoeff() == kPenaltyScore);
    CHECK_FALSE(std::filesystem::exists(d / "b2.json"));
}

TEST_CASE("optimize resumes from an interrupted trial log") {
    TempDir d("cli_resume");
    make_data(d);
    const std::string common = "optimize --bounds " + small_bounds(d) + " --target " + d / "traj.train.csv" +
                               " --feedback --n-trust-regions 2 --initial-samples 5 --max-evals ";
    REQUIRE(run(common + "30 --out " + d / "full.json --log " + d / "full.csv") == 0);

    // Simulated interruption: keep the header and the first 17 rows.
    const std::string text = read_file(d / "full.csv");
    std::size_t pos = 0;
    for (int i = 0; i < 18; ++i) pos = text.find('\n', pos) + 1;
    write_file(d / "partial.csv", text.substr(0, pos));
    std::filesystem::copy_file(d / "full.csv.json", d / "partial.csv.json");

    const Series partial = read_csv(d / "partial.csv");
    const double partial_best = partial.select({"score"}).minCoeff();

    REQUIRE(run(common + "17 --resume " + d / "partial.csv" + " --out " + d / "recovered.json --log " +
                d / "recovered.csv") == 0);
    CHECK(read_json_file(d / "recovered.json").at("score").get<double>() == partial_best);

    REQUIRE(run(common + "30 --resume " + d / "partial.csv" + " --out " + d / "resumed.json --log " +
                d / "resumed.csv") == 0);
    CHECK(read_file(d / "resumed.csv") == read_file(d / "full.csv"));
    CHECK(read_json_file(d / "resumed.json").at("hyperparams") == read_json_file(d / "full.json").at("hyperparams"));

    // Same log, different objective.
    CHECK(run("optimize --bounds " + d / "bounds.toml" + " --target " + d / "traj.test.csv" +
              " --feedback --n-trust-regions 2 --initial-samples 5 --max-evals 30 --resume " + d / "partial.csv" +
              " --out " + d / "x.json --log " + d / "x.csv") == 2);
}

TEST_CASE("plot renders phase space with x across and p up") {
    TempDir d("cli_plot");
    write_file(d / "pred.csv", "k,x_pred,p_pred\n0,-1,5\n1,0,6\n2,1,7\n");
    REQUIRE(run("plot --kind phase --in " + d / "pred.csv --out " + d / "phase.svg") == 0);
    const std::string svg = read_file(d / "phase.svg");
    CHECK(svg.find("points=\"70.00,390.00") != std::string::npos);
    CHECK(svg.find(">x</text>") != std::string::npos);
    CHECK(svg.find(">p</text>") != std::string::npos);
    REQUIRE(run("plot --kind trajectory --in " + d / "pred.csv --out " + d / "traj.svg") == 0);
    CHECK(run("plot --kind residual --in " + d / "pred.csv --out " + d / "res.svg") == 2);
}

TEST_CASE("heatmap and experiment commands") {
    TempDir d("cli_exp");
    write_file(d / "heat.toml", "[reservoir.hyperparams]\nn_nodes = 30\n[trajectory]\nsteps = 3000\n"
                                "[heatmap]\namplitudes = [0.2]\nfrequencies = [0.3, 0.6]\n");
    REQUIRE(run("heatmap --config " + d / "heat.toml" + " --mode parameter_aware --out " + d / "grid.csv") == 0);
    const Series grid = read_csv(d / "grid.csv");
    CHECK(grid.rows() == 2);
    CHECK(std::filesystem::exists(d / "grid.svg"));
    const auto meta = read_json_file(d / "grid.csv.json");
    CHECK(meta.at("run_config").at("settings").at("heatmap").at("mode") == "parameter_aware");

    write_file(d / "exp.toml", "preset = \"parameter_aware\"\n[trajectory]\nsteps = 2000\n"
                               "[reservoir.hyperparams]\nn_nodes = 40\n");
    REQUIRE(run("forecast --config " + d / "exp.toml" + " --out-dir " + d / "fc") == 0);
    const auto summary = read_json_file(d / "fc/summary.json");
    const Series pred = read_csv(d / "fc/prediction.csv");
    double num = 0.0, den = 0.0;
    for (Eigen::Index r = 0; r < pred.rows(); ++r)
        for (int c : {1, 2}) {
            num += std::pow(pred.data(r, c) - pred.data(r, c + 2), 2);
            den += pred.data(r, c) * pred.data(r, c);
        }
    CHECK(std::abs(num / den - summary.at("test_nmse").get<double>()) <= 1e-12);
    CHECK_FALSE(std::filesystem::exists(d / "fc/timing.json"));

    // The embedded run configuration re-executes to the same outputs.
    write_file(d / "rerun.json", summary.at("run_config").at("settings").dump());
    REQUIRE(run("forecast --config " + d / "rerun.json" + " --out-dir " + d / "fc2") == 0);
    CHECK(read_file(d / "fc2/prediction.csv") == read_file(d / "fc/prediction.csv"));

    write_file(d / "noise.toml", "preset = \"noise_study\"\n[trajectory]\nsteps = 3000\n"
                                 "[reservoir.hyperparams]\nn_nodes = 40\n");
    REQUIRE(run("noise-study --config " + d / "noise.toml" + " --out-dir " + d / "ns --timing") == 0);
    const auto ns = read_json_file(d / "ns/summary.json");
    CHECK(ns.at("noisy_data_phase_error").get<double>() > 0.0);
    CHECK(read_csv(d / "ns/noisy_training.csv").rows() == 1200);
    CHECK(std::filesystem::exists(d / "ns/timing.json"));
    CHECK(run("forecast --preset nope --out-dir " + d / "x") == 2);
}
