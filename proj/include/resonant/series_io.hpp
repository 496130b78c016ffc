#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "resonant/pendulum.hpp"
#include "resonant/reservoir.hpp"

namespace resonant {

/// Named columns over a shared row index.
struct Series {
    std::vector<std::string> columns;
    RowMatrix data;

    Eigen::Index rows() const noexcept { return data.rows(); }
    /// Index of `name`, or -1.
    int find(const std::string& name) const;
    /// Sub-matrix of the named columns, in the given order.
    RowMatrix select(const std::vector<std::string>& names) const;
    /// Every column except those listed.
    Series without(const std::vector<std::string>& names) const;
    Series slice_rows(Eigen::Index begin, Eigen::Index end) const;
};

/// Comma-separated file with a single header line. Values are written in
/// shortest round-trip form.
Series read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Series& series);
std::string format_double(double v);

/// Sidecar path holding the JSON metadata of a CSV artifact: "<file>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& path);

nlohmann::json trajectory_metadata(const TrajectoryData& traj);

/// Writes t,x,p and a sidecar with dt, force, initial conditions, noise and
/// the producing run configuration.
void write_trajectory(const std::filesystem::path& path, const TrajectoryData& traj,
                      const nlohmann::json& run_config = nullptr);
/// Reads t,x,p; restores dt/force/initial conditions from the sidecar when present.
TrajectoryData read_trajectory(const std::filesystem::path& path);

/// Target channels of a series: everything except a leading "t"/"k" index column.
Series value_columns(const Series& s);

}  // namespace resonant
