#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "resonant/reservoir.hpp"

namespace resonant {

enum class ForceFamily { sin, sincos };

std::string_view to_string(ForceFamily f);
ForceFamily parse_force_family(std::string_view name);

/// Driving force a * f(omega t); f is sin or sin*cos.
struct ForceSpec {
    ForceFamily family = ForceFamily::sin;
    double amplitude = 0.0;
    double frequency = 0.0;

    bool operator==(const ForceSpec&) const = default;
};

double force_eval(const ForceSpec& spec, double t);

/// Integrated forced-pendulum trajectory on the exact grid t_k = t0 + k dt.
struct TrajectoryData {
    Eigen::VectorXd t;
    Eigen::VectorXd x;
    Eigen::VectorXd p;
    double dt = 0.0;
    double t0 = 0.0;
    ForceSpec force;
    double x0 = 0.0;
    double p0 = 0.0;
    double noise_amplitude = 0.0;
    std::uint64_t noise_seed = 0;

    Eigen::Index size() const noexcept { return t.size(); }
    /// Rows (x_k, p_k).
    RowMatrix states() const;
    /// Column of force values on the time grid.
    RowMatrix force_series() const;
};

/// Classical fixed-step RK4 on x' = p, p' = -sin x + force(t). Produces
/// n_steps samples, the first being the initial condition.
TrajectoryData integrate(double x0, double p0, double dt, int n_steps, const ForceSpec& spec,
                         double t0 = 0.0);

/// Perturbs x and p by independent uniform(-amplitude, amplitude) draws.
TrajectoryData add_noise(const TrajectoryData& traj, double amplitude, std::uint64_t seed);

struct ResonanceCriteria {
    double position_threshold = 3.141592653589793;
    double growth_factor = 1.5;
};

/// True when |x| ever exceeds the threshold or the peak |x| over the final
/// third exceeds growth_factor times the peak over the first third.
bool detect_resonance(const Eigen::VectorXd& x, const ResonanceCriteria& criteria = {});
bool detect_resonance(const TrajectoryData& traj, const ResonanceCriteria& criteria = {});

}  // namespace resonant
