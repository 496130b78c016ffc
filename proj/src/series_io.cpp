#include "resonant/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "resonant/errors.hpp"
#include "resonant/model_io.hpp"

namespace resonant {

using nlohmann::json;

int Series::find(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

RowMatrix Series::select(const std::vector<std::string>& names) const {
    RowMatrix out(data.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        const int c = find(names[i]);
        if (c < 0) throw InvalidArgument("series has no column '" + names[i] + "'");
        out.col(static_cast<Eigen::Index>(i)) = data.col(c);
    }
    return out;
}

Series Series::without(const std::vector<std::string>& names) const {
    std::vector<std::string> keep;
    for (const auto& c : columns)
        if (std::find(names.begin(), names.end(), c) == names.end()) keep.push_back(c);
    return Series{keep, select(keep)};
}

Series Series::slice_rows(Eigen::Index begin, Eigen::Index end) const {
    if (begin < 0 || end > rows() || begin > end) throw InvalidArgument("row slice out of range");
    return Series{columns, data.middleRows(begin, end - begin)};
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("failed to format double");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Series read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("'" + path.string() + "' is empty");
    Series s;
    s.columns = split_line(line);
    if (s.columns.empty()) throw InvalidArgument("'" + path.string() + "' has no header");
    std::vector<double> values;
    Eigen::Index rows = 0;
    const auto width = s.columns.size();
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != width)
            throw InvalidArgument("'" + path.string() + "' row " + std::to_string(rows + 2) +
                                  " has " + std::to_string(cells.size()) + " fields, expected " +
                                  std::to_string(width));
        for (const auto& c : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size())
                throw InvalidArgument("'" + path.string() + "' contains non-numeric field '" + c + "'");
            values.push_back(v);
        }
        ++rows;
    }
    s.data = Eigen::Map<RowMatrix>(values.data(), rows, static_cast<Eigen::Index>(width));
    return s;
}

void write_csv(const std::filesystem::path& path, const Series& series) {
    if (static_cast<Eigen::Index>(series.columns.size()) != series.data.cols())
        throw DimensionMismatch("column names and data width differ");
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < series.columns.size(); ++i)
        out << (i ? "," : "") << series.columns[i];
    out << '\n';
    for (Eigen::Index r = 0; r < series.data.rows(); ++r) {
        for (Eigen::Index c = 0; c < series.data.cols(); ++c)
            out << (c ? "," : "") << format_double(series.data(r, c));
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".json");
}

json trajectory_metadata(const TrajectoryData& traj) {
    return {{"dt", traj.dt},
            {"t0", traj.t0},
            {"steps", traj.size()},
            {"force",
             {{"family", std::string(to_string(traj.force.family))},
              {"amplitude", traj.force.amplitude},
              {"frequency", traj.force.frequency}}},
            {"x0", traj.x0},
            {"p0", traj.p0},
            {"noise", {{"amplitude", traj.noise_amplitude}, {"seed", traj.noise_seed}}}};
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryData& traj,
                      const json& run_config) {
    Series s{{"t", "x", "p"}, RowMatrix(traj.size(), 3)};
    s.data.col(0) = traj.t;
    s.data.col(1) = traj.x;
    s.data.col(2) = traj.p;
    write_csv(path, s);
    json meta = trajectory_metadata(traj);
    if (!run_config.is_null()) meta["run_config"] = run_config;
    write_json_file(sidecar_path(path), meta);
}

TrajectoryData read_trajectory(const std::filesystem::path& path) {
    const Series s = read_csv(path);
    TrajectoryData traj;
    const RowMatrix cols = s.select({"t", "x", "p"});
    traj.t = cols.col(0);
    traj.x = cols.col(1);
    traj.p = cols.col(2);
    if (traj.size() >= 2) traj.dt = traj.t[1] - traj.t[0];
    if (traj.size() >= 1) {
        traj.t0 = traj.t[0];
        traj.x0 = traj.x[0];
        traj.p0 = traj.p[0];
    }
    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        const json meta = read_json_file(side);
        try {
            traj.dt = meta.at("dt").get<double>();
            traj.t0 = meta.value("t0", traj.t0);
            const auto& f = meta.at("force");
            traj.force.family = parse_force_family(f.at("family").get<std::string>());
            traj.force.amplitude = f.at("amplitude").get<double>();
            traj.force.frequency = f.at("frequency").get<double>();
            traj.x0 = meta.value("x0", traj.x0);
            traj.p0 = meta.value("p0", traj.p0);
            if (meta.contains("noise")) {
                traj.noise_amplitude = meta["noise"].value("amplitude", 0.0);
                traj.noise_seed = meta["noise"].value("seed", std::uint64_t{0});
            }
        } catch (const json::exception& e) {
            throw InvalidArgument("malformed trajectory sidecar: " + std::string(e.what()));
        }
    }
    return traj;
}

Series value_columns(const Series& s) { return s.without({"t", "k"}); }

}  // namespace resonant
