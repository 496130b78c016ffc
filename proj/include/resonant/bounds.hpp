#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "resonant/reservoir.hpp"

namespace resonant {

enum class Scale { linear, log10 };

/// One searched hyper-parameter. `lower`/`upper` are in search units, so a
/// log10 coordinate over (-2, -0.1) spans connectivity 0.01 .. 0.794.
struct Coordinate {
    std::string name;  // e.g. "log_connectivity"
    std::string hp;    // HyperParams field it decodes to
    double lower = 0.0;
    double upper = 1.0;
    Scale scale = Scale::linear;
    bool integer = false;
};

/// Search space over HyperParams. Coordinates follow the fixed order n_nodes,
/// spectral_radius, connectivity, leaking_rate, bias, regularization, skipping
/// those that are not searched. Unsearched fields take `fixed`.
class BoundsSpec {
public:
    BoundsSpec(std::vector<Coordinate> coords, HyperParams fixed);

    /// Six-dimensional space used for the sincos re-optimization study.
    static BoundsSpec standard();

    /// Keys are HyperParams names, optionally prefixed with "log_" for a
    /// log10 search. A two-element array is an interval, a scalar fixes the
    /// value. Entries may sit at top level or inside a [bounds] table.
    static BoundsSpec from_toml_string(std::string_view text, const HyperParams& defaults = {});
    static BoundsSpec from_toml_file(const std::filesystem::path& path, const HyperParams& defaults = {});

    int dims() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<Coordinate>& coordinates() const noexcept { return coords_; }
    const HyperParams& fixed() const noexcept { return fixed_; }

    /// Maps a point of [0,1]^d to hyper-parameters. Coordinates outside the
    /// unit interval are clipped.
    HyperParams decode(const Eigen::VectorXd& point) const;
    /// Inverse of decode. Throws OutOfBounds when `hps` lies outside the space.
    Eigen::VectorXd encode(const HyperParams& hps) const;

    nlohmann::json to_json() const;

private:
    std::vector<Coordinate> coords_;
    HyperParams fixed_;
};

}  // namespace resonant
