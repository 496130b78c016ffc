#include "resonant/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "resonant/errors.hpp"
#include "toml.hpp"

namespace resonant {

namespace {

constexpr std::array<std::string_view, 6> kFieldOrder = {
    "n_nodes", "spectral_radius", "connectivity", "leaking_rate", "bias", "regularization"};

double get_field(const HyperParams& h, std::string_view f) {
    if (f == "n_nodes") return h.n_nodes;
    if (f == "spectral_radius") return h.spectral_radius;
    if (f == "connectivity") return h.connectivity;
    if (f == "leaking_rate") return h.leaking_rate;
    if (f == "bias") return h.bias;
    return h.regularization;
}

void set_field(HyperParams& h, std::string_view f, double v) {
    if (f == "n_nodes")
        h.n_nodes = static_cast<int>(std::lround(v));
    else if (f == "spectral_radius")
        h.spectral_radius = v;
    else if (f == "connectivity")
        h.connectivity = v;
    else if (f == "leaking_rate")
        h.leaking_rate = v;
    else if (f == "bias")
        h.bias = v;
    else
        h.regularization = v;
}

double to_value(const Coordinate& c, double search) {
    return c.scale == Scale::log10 ? std::pow(10.0, search) : search;
}

}  // namespace

BoundsSpec::BoundsSpec(std::vector<Coordinate> coords, HyperParams fixed)
    : fixed_(fixed) {
    for (auto field : kFieldOrder)
        for (auto& c : coords)
            if (c.hp == field) coords_.push_back(c);
    if (coords_.size() != coords.size())
        throw InvalidArgument("bounds contain an unknown or duplicated hyper-parameter");
    for (std::size_t i = 1; i < coords_.size(); ++i)
        if (coords_[i].hp == coords_[i - 1].hp)
            throw InvalidArgument("hyper-parameter '" + coords_[i].hp + "' is bounded twice");
    for (auto& c : coords_) {
        if (!(c.lower < c.upper) || !std::isfinite(c.lower) || !std::isfinite(c.upper))
            throw InvalidArgument("bounds for '" + c.name + "' need finite lower < upper");
        c.integer = c.hp == "n_nodes";
        if (c.integer && c.scale == Scale::log10)
            throw InvalidArgument("n_nodes is searched linearly");
        // Both interval ends must decode to valid hyper-parameters.
        for (double end : {c.lower, c.upper}) {
            HyperParams probe = fixed_;
            set_field(probe, c.hp, to_value(c, end));
            try {
                probe.validate();
            } catch (const InvalidArgument& e) {
                throw InvalidArgument("bounds for '" + c.name + "' leave the valid range: " + e.what());
            }
        }
    }
    fixed_.validate();
}

BoundsSpec BoundsSpec::standard() {
    return BoundsSpec({{"log_connectivity", "connectivity", -2.0, -0.1, Scale::log10},
                       {"spectral_radius", "spectral_radius", 0.6, 2.0},
                       {"n_nodes", "n_nodes", 250.0, 253.0},
                       {"log_regularization", "regularization", -3.0, 3.0, Scale::log10},
                       {"leaking_rate", "leaking_rate", 0.0, 1.0},
                       {"bias", "bias", 0.0, 1.0}},
                      HyperParams{});
}

BoundsSpec BoundsSpec::from_toml_string(std::string_view text, const HyperParams& defaults) {
    toml::table doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "bounds file: " << e.description() << " at line " << e.source().begin.line;
        throw InvalidArgument(msg.str());
    }
    const toml::table* table = &doc;
    if (auto* b = doc["bounds"].as_table()) table = b;

    std::vector<Coordinate> coords;
    HyperParams fixed = defaults;
    for (const auto& [key, node] : *table) {
        std::string name(key.str());
        Coordinate c{name, name};
        if (name.rfind("log_", 0) == 0) {
            c.hp = name.substr(4);
            c.scale = Scale::log10;
        }
        bool known = false;
        for (auto f : kFieldOrder) known |= c.hp == f;
        if (!known) throw InvalidArgument("bounds file: unknown hyper-parameter '" + name + "'");

        if (auto* arr = node.as_array()) {
            if (arr->size() != 2) throw InvalidArgument("bounds for '" + name + "' need [lower, upper]");
            auto lo = (*arr)[0].value<double>(), hi = (*arr)[1].value<double>();
            if (!lo || !hi) throw InvalidArgument("bounds for '" + name + "' must be numbers");
            c.lower = *lo;
            c.upper = *hi;
            coords.push_back(c);
        } else if (auto v = node.value<double>()) {
            set_field(fixed, c.hp, to_value(c, *v));
        } else {
            throw InvalidArgument("bounds for '" + name + "' must be a number or a [lower, upper] pair");
        }
    }
    if (coords.empty()) throw InvalidArgument("bounds file defines no search interval");
    return BoundsSpec(std::move(coords), fixed);
}

BoundsSpec BoundsSpec::from_toml_file(const std::filesystem::path& path, const HyperParams& defaults) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open bounds file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_toml_string(ss.str(), defaults);
}

HyperParams BoundsSpec::decode(const Eigen::VectorXd& point) const {
    if (point.size() != dims())
        throw DimensionMismatch("point has " + std::to_string(point.size()) + " coordinates, space has " +
                                std::to_string(dims()));
    HyperParams h = fixed_;
    for (int i = 0; i < dims(); ++i) {
        const auto& c = coords_[static_cast<std::size_t>(i)];
        const double u = std::clamp(point[i], 0.0, 1.0);
        set_field(h, c.hp, to_value(c, c.lower + u * (c.upper - c.lower)));
    }
    return h;
}

Eigen::VectorXd BoundsSpec::encode(const HyperParams& hps) const {
    Eigen::VectorXd u(dims());
    for (int i = 0; i < dims(); ++i) {
        const auto& c = coords_[static_cast<std::size_t>(i)];
        const double v = get_field(hps, c.hp);
        if (c.scale == Scale::log10 && !(v > 0.0))
            throw OutOfBounds("'" + c.hp + "' must be positive to lie in a log-scaled space");
        const double s = c.scale == Scale::log10 ? std::log10(v) : v;
        const double x = (s - c.lower) / (c.upper - c.lower);
        const double tol = 1e-12;
        if (x < -tol || x > 1.0 + tol)
            throw OutOfBounds("'" + c.hp + "' = " + std::to_string(v) + " lies outside [" +
                              std::to_string(to_value(c, c.lower)) + ", " +
                              std::to_string(to_value(c, c.upper)) + "]");
        u[i] = std::clamp(x, 0.0, 1.0);
    }
    return u;
}

nlohmann::json BoundsSpec::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& c : coords_) j[c.name] = {c.lower, c.upper};
    for (auto f : kFieldOrder) {
        bool searched = false;
        for (const auto& c : coords_) searched |= c.hp == f;
        if (!searched) j["fixed"][std::string(f)] = get_field(fixed_, f);
    }
    return j;
}

}  // namespace resonant
