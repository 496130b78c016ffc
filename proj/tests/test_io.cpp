#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "resonant/errors.hpp"
#include "resonant/model_io.hpp"
#include "resonant/random.hpp"
#include "resonant/series_io.hpp"

using namespace resonant;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("resonant_io_" + std::to_string(Rng(std::random_device{}())()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv round trip is exact") {
    TempDir dir;
    Rng rng(4);
    Series s{{"t", "x", "p"}, RowMatrix(50, 3)};
    for (Eigen::Index i = 0; i < s.data.size(); ++i) s.data.data()[i] = standard_normal(rng) * 1e3;
    s.data(0, 0) = 0.1;
    s.data(1, 1) = -0.0;
    s.data(2, 2) = 5e-324;
    write_csv(dir.path / "a.csv", s);
    const Series back = read_csv(dir.path / "a.csv");
    CHECK(back.columns == s.columns);
    CHECK((back.data.array() == s.data.array()).all());
    CHECK(value_columns(back).columns == std::vector<std::string>{"x", "p"});
    CHECK(back.slice_rows(10, 20).rows() == 10);
    CHECK_THROWS_AS(back.select({"q"}), InvalidArgument);
}

TEST_CASE("malformed csv is rejected") {
    TempDir dir;
    {
        std::ofstream(dir.path / "ragged.csv") << "x,p\n1,2\n3\n";
        std::ofstream(dir.path / "text.csv") << "x\nabc\n";
    }
    CHECK_THROWS_AS(read_csv(dir.path / "ragged.csv"), InvalidArgument);
    CHECK_THROWS_AS(read_csv(dir.path / "text.csv"), InvalidArgument);
    CHECK_THROWS_AS(read_csv(dir.path / "missing.csv"), InvalidArgument);
}

TEST_CASE("trajectory sidecar restores the generating settings") {
    TempDir dir;
    auto traj = add_noise(integrate(0.1, 0.2, 0.05, 40, {ForceFamily::sincos, 0.5, 0.6}, 1.0), 0.01, 9);
    write_trajectory(dir.path / "traj.csv", traj, {{"command", "generate-data"}});
    CHECK(fs::exists(dir.path / "traj.csv.json"));
    const auto back = read_trajectory(dir.path / "traj.csv");
    CHECK(back.x == traj.x);
    CHECK(back.t == traj.t);
    CHECK(back.dt == traj.dt);
    CHECK(back.force == traj.force);
    CHECK(back.x0 == 0.1);
    CHECK(back.noise_seed == 9);
    CHECK(read_json_file(dir.path / "traj.csv.json").at("run_config").at("command") == "generate-data");
}

TEST_CASE("hyper-parameter documents") {
    HyperParams h;
    h.n_nodes = 202;
    h.spectral_radius = 1.1329107284545898;
    h.connectivity = 0.4071449746896983;
    h.leaking_rate = 0.009808523580431938;
    h.bias = 0.48509588837623596;
    h.regularization = 1.6862021450927922;
    CHECK(hyperparams_from_json(nlohmann::json::parse(to_json(h).dump())) == h);
    auto j = to_json(h);
    j["n_nodes"] = 202.0;
    CHECK(hyperparams_from_json(j).n_nodes == 202);
    j["connectivity"] = 0.0;
    CHECK_THROWS_AS(hyperparams_from_json(j), InvalidArgument);

    ActivationMix mix({{Activation::tanh, 0.1}, {Activation::relu, 0.9}});
    CHECK(activation_mix_from_json(to_json(mix)) == mix);
    CHECK(activation_mix_from_json("sin") == ActivationMix(Activation::sin));
}
