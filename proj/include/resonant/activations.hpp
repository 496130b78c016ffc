#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace resonant {

enum class Activation : std::uint8_t {
    tanh,
    relu,
    sin,
    identity,
    hybrid_relu_tanh,
};

inline constexpr std::array<Activation, 5> kAllActivations = {
    Activation::tanh, Activation::relu, Activation::sin, Activation::identity,
    Activation::hybrid_relu_tanh};

std::string_view to_string(Activation a);

/// Accepts the canonical names plus the short alias "hybrid".
Activation parse_activation(std::string_view name);

/// Parameters of the hybrid activation: linear inside |x| <= theta_star, tanh outside.
struct HybridReluTanhParams {
    double theta_star = 1.0;

    void validate() const;
};

/// Probability weights over activations, renormalized to sum to one.
class ActivationMix {
public:
    /// Single-activation mix, all nodes share `a`.
    explicit ActivationMix(Activation a = Activation::tanh);

    /// Throws EmptyMix if no weight is positive, InvalidArgument on negative
    /// or non-finite weights.
    explicit ActivationMix(const std::map<Activation, double>& weights);

    /// Parses "tanh=0.1,relu=0.9" (spaces and surrounding braces ignored).
    static ActivationMix parse(std::string_view text);

    const std::map<Activation, double>& probabilities() const noexcept { return probs_; }
    double probability(Activation a) const;

    /// "tanh=0.5,relu=0.5" using the normalized probabilities.
    std::string to_string() const;

    bool operator==(const ActivationMix&) const = default;

private:
    std::map<Activation, double> probs_;
};

/// Draws each node's activation independently with the mix probabilities.
std::vector<Activation> assign(const ActivationMix& mix, int n_nodes, std::uint64_t seed);

double apply(Activation a, double x, const HybridReluTanhParams& params = {});

/// Applies per-node activations in place.
void apply_in_place(const std::vector<Activation>& assignment,
                    const HybridReluTanhParams& params, Eigen::Ref<Eigen::VectorXd> v);

enum class Direction { forward, inverse };

/// True for activations usable as an invertible output activation.
bool is_invertible_output(Activation g);

/// True when g's range is bounded (target scaling must leave a margin).
bool has_bounded_range(Activation g);

/// Output activation g or its inverse, elementwise. Only identity and tanh
/// are invertible; the inverse of tanh throws OutOfRange for |v| >= 1.
Eigen::VectorXd output_transform(Activation g, Direction direction, const Eigen::VectorXd& v);

}  // namespace resonant
