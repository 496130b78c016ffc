#include "resonant/pendulum.hpp"

#include <cmath>

#include "resonant/errors.hpp"
#include "resonant/random.hpp"

namespace resonant {

std::string_view to_string(ForceFamily f) { return f == ForceFamily::sin ? "sin" : "sincos"; }

ForceFamily parse_force_family(std::string_view name) {
    if (name == "sin") return ForceFamily::sin;
    if (name == "sincos") return ForceFamily::sincos;
    throw InvalidArgument("unknown force family '" + std::string(name) + "' (sin or sincos)");
}

double force_eval(const ForceSpec& spec, double t) {
    const double phase = spec.frequency * t;
    if (spec.family == ForceFamily::sin) return spec.amplitude * std::sin(phase);
    return spec.amplitude * std::sin(phase) * std::cos(phase);
}

RowMatrix TrajectoryData::states() const {
    RowMatrix s(size(), 2);
    s.col(0) = x;
    s.col(1) = p;
    return s;
}

RowMatrix TrajectoryData::force_series() const {
    RowMatrix f(size(), 1);
    for (Eigen::Index k = 0; k < size(); ++k) f(k, 0) = force_eval(force, t[k]);
    return f;
}

TrajectoryData integrate(double x0, double p0, double dt, int n_steps, const ForceSpec& spec,
                         double t0) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
    if (!std::isfinite(x0) || !std::isfinite(p0)) throw InvalidArgument("initial conditions must be finite");

    TrajectoryData traj;
    traj.dt = dt;
    traj.t0 = t0;
    traj.force = spec;
    traj.x0 = x0;
    traj.p0 = p0;
    traj.t.resize(n_steps);
    traj.x.resize(n_steps);
    traj.p.resize(n_steps);

    auto accel = [&](double t, double x) { return -std::sin(x) + force_eval(spec, t); };
    double x = x0, p = p0;
    for (int k = 0; k < n_steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        traj.t[k] = t;
        traj.x[k] = x;
        traj.p[k] = p;
        const double half = 0.5 * dt;
        const double k1x = p, k1p = accel(t, x);
        const double k2x = p + half * k1p, k2p = accel(t + half, x + half * k1x);
        const double k3x = p + half * k2p, k3p = accel(t + half, x + half * k2x);
        const double k4x = p + dt * k3p, k4p = accel(t + dt, x + dt * k3x);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    return traj;
}

TrajectoryData add_noise(const TrajectoryData& traj, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw InvalidArgument("noise amplitude must be >= 0");
    TrajectoryData noisy = traj;
    noisy.noise_amplitude = amplitude;
    noisy.noise_seed = seed;
    if (amplitude == 0.0) return noisy;
    Rng rng(seed);
    for (Eigen::Index k = 0; k < noisy.size(); ++k) {
        noisy.x[k] += uniform(rng, -amplitude, amplitude);
        noisy.p[k] += uniform(rng, -amplitude, amplitude);
    }
    return noisy;
}

bool detect_resonance(const Eigen::VectorXd& x, const ResonanceCriteria& criteria) {
    const Eigen::Index n = x.size();
    if (n < 3) throw InvalidArgument("resonance check needs at least three samples");
    if (x.cwiseAbs().maxCoeff() > criteria.position_threshold) return true;
    const Eigen::Index third = n / 3;
    const double head = x.head(third).cwiseAbs().maxCoeff();
    const double tail = x.tail(third).cwiseAbs().maxCoeff();
    return tail > criteria.growth_factor * head;
}

bool detect_resonance(const TrajectoryData& traj, const ResonanceCriteria& criteria) {
    return detect_resonance(traj.x, criteria);
}

}  // namespace resonant
