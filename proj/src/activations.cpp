#include "resonant/activations.hpp"

#include <cmath>
#include <sstream>

#include "resonant/errors.hpp"
#include "resonant/random.hpp"

namespace resonant {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::sin: return "sin";
        case Activation::identity: return "identity";
        case Activation::hybrid_relu_tanh: return "hybrid_relu_tanh";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    for (auto a : kAllActivations)
        if (name == to_string(a)) return a;
    if (name == "hybrid") return Activation::hybrid_relu_tanh;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

void HybridReluTanhParams::validate() const {
    if (!(theta_star > 0.0) || !std::isfinite(theta_star))
        throw InvalidArgument("theta_star must be a positive finite number");
}

ActivationMix::ActivationMix(Activation a) { probs_[a] = 1.0; }

ActivationMix::ActivationMix(const std::map<Activation, double>& weights) {
    double total = 0.0;
    for (const auto& [a, w] : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw InvalidArgument("activation weight for " + std::string(resonant::to_string(a)) +
                                  " must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw EmptyMix("activation mix has no positive weight");
    for (const auto& [a, w] : weights)
        if (w > 0.0) probs_[a] = w / total;
}

ActivationMix ActivationMix::parse(std::string_view text) {
    std::map<Activation, double> weights;
    std::string cleaned;
    for (char ch : text)
        if (ch != ' ' && ch != '{' && ch != '}' && ch != '\'' && ch != '"') cleaned += ch;
    if (cleaned.empty()) throw EmptyMix("empty activation mix");
    // A bare name means a single-activation mix.
    if (cleaned.find('=') == std::string::npos && cleaned.find(':') == std::string::npos &&
        cleaned.find(',') == std::string::npos)
        return ActivationMix(parse_activation(cleaned));
    std::stringstream ss(cleaned);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto pos = item.find_first_of("=:");
        if (pos == std::string::npos)
            throw InvalidArgument("activation mix entry '" + item + "' lacks '='");
        const auto name = item.substr(0, pos);
        const auto value = item.substr(pos + 1);
        double w = 0.0;
        try {
            std::size_t used = 0;
            w = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw InvalidArgument("activation weight '" + value + "' is not a number");
        }
        weights[parse_activation(name)] += w;
    }
    return ActivationMix(weights);
}

double ActivationMix::probability(Activation a) const {
    auto it = probs_.find(a);
    return it == probs_.end() ? 0.0 : it->second;
}

std::string ActivationMix::to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [a, p] : probs_) {
        if (!first) os << ',';
        os << resonant::to_string(a) << '=' << p;
        first = false;
    }
    return os.str();
}

std::vector<Activation> assign(const ActivationMix& mix, int n_nodes, std::uint64_t seed) {
    if (n_nodes < 0) throw InvalidArgument("n_nodes must be non-negative");
    const auto& probs = mix.probabilities();
    std::vector<Activation> out(static_cast<std::size_t>(n_nodes), probs.begin()->first);
    if (probs.size() == 1) return out;

    std::vector<std::pair<Activation, double>> cumulative;
    double acc = 0.0;
    for (const auto& [a, p] : probs) {
        acc += p;
        cumulative.emplace_back(a, acc);
    }
    Rng rng(seed);
    for (auto& slot : out) {
        const double u = uniform01(rng) * acc;
        slot = cumulative.back().first;
        for (const auto& [a, c] : cumulative)
            if (u < c) {
                slot = a;
                break;
            }
    }
    return out;
}

double apply(Activation a, double x, const HybridReluTanhParams& params) {
    switch (a) {
        case Activation::tanh: return std::tanh(x);
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sin: return std::sin(x);
        case Activation::identity: return x;
        case Activation::hybrid_relu_tanh:
            return std::abs(x) <= params.theta_star ? x : std::tanh(x);
    }
    return x;
}

void apply_in_place(const std::vector<Activation>& assignment,
                    const HybridReluTanhParams& params, Eigen::Ref<Eigen::VectorXd> v) {
    const auto n = static_cast<Eigen::Index>(assignment.size());
    for (Eigen::Index i = 0; i < n; ++i) v[i] = apply(assignment[i], v[i], params);
}

bool is_invertible_output(Activation g) {
    return g == Activation::identity || g == Activation::tanh;
}

bool has_bounded_range(Activation g) { return g == Activation::tanh; }

Eigen::VectorXd output_transform(Activation g, Direction direction, const Eigen::VectorXd& v) {
    if (!is_invertible_output(g))
        throw InvalidArgument("output activation '" + std::string(to_string(g)) +
                              "' is not invertible");
    if (g == Activation::identity) return v;
    if (direction == Direction::forward) return v.array().tanh();
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(std::abs(v[i]) < 1.0))
            throw OutOfRange("atanh input " + std::to_string(v[i]) +
                             " is outside (-1, 1); tighten the target scaler margin");
        out[i] = std::atanh(v[i]);
    }
    return out;
}

}  // namespace resonant
