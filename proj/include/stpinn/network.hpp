#pragma once

#include "stpinn/dual2.hpp"
#include "stpinn/jet.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stpinn {

enum class Activation : std::uint8_t { tanh = 0, sigmoid = 1 };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct NetConfig {
    int num_hidden = 4;  // hidden layers
    int dim_hidden = 80; // neurons per hidden layer
    Activation activation = Activation::tanh;
    std::uint64_t seed = 0;
};

struct Layer {
    Eigen::MatrixXd weight; // out x in
    Eigen::VectorXd bias;   // out
};

/// Fully connected network R^3 -> R: an input layer 3 -> h, num_hidden - 1
/// hidden layers h -> h, and a linear output layer h -> 1. The activation
/// follows every layer but the last.
///
/// Flattened parameter order (gradients, optimizer state, checkpoints):
/// layer by layer, the weight matrix row-major followed by the bias.
class Mlp {
public:
    Mlp(std::vector<Layer> layers, Activation activation, std::uint64_t seed = 0);

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& mutable_layers() { return layers_; }
    Activation activation() const { return activation_; }
    std::uint64_t seed() const { return seed_; }

    std::size_t num_parameters() const;
    Eigen::VectorXd flatten() const;
    void assign(std::span<const double> params);
    bool all_finite() const;

    /// Scales the output layer so that f and every derivative scale by c.
    void scale_output(double c);

    bool operator==(const Mlp& other) const;

private:
    std::vector<Layer> layers_;
    Activation activation_;
    std::uint64_t seed_;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
Mlp init(const NetConfig& config);

/// Network whose weights are all zero and whose output bias is `value`,
/// i.e. u == value everywhere. Same shape as `config` describes.
Mlp constant_network(const NetConfig& config, double value);

double eval_f(const Mlp& net, double x, double y, double t);

/// d^order u / d wrt^order at (x, y, t); order must be 1 or 2.
double eval_derivative(const Mlp& net, double x, double y, double t, Axis wrt, int order);

/// All jet components at one point through three Dual2 sweeps.
Jet<double> eval_jet(const Mlp& net, const Point& p);

/// Forward pass over an arbitrary scalar algebra. `params` follows the
/// flattened layout of `shape`; its values are used instead of the network's
/// own (only the shape and activation of `shape` are read). Used with
/// Param = Var, S = Dual2<Var> to put the whole computation on a Tape.
template <class Param, class S>
S forward_generic(const Mlp& shape, std::span<const Param> params, const std::array<S, 3>& input) {
    std::vector<S> h(input.begin(), input.end());
    std::size_t k = 0;
    const auto& layers = shape.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto rows = layers[l].weight.rows();
        const auto cols = layers[l].weight.cols();
        std::vector<S> out;
        out.reserve(static_cast<std::size_t>(rows));
        const std::size_t bias_at = k + static_cast<std::size_t>(rows * cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            S acc = h[0] * params[k + r * cols];
            for (Eigen::Index c = 1; c < cols; ++c) acc = acc + h[c] * params[k + r * cols + c];
            acc = acc + params[bias_at + static_cast<std::size_t>(r)];
            out.push_back(acc);
        }
        k = bias_at + static_cast<std::size_t>(rows);
        if (l + 1 < layers.size()) {
            for (auto& v : out) v = shape.activation() == Activation::tanh ? tanh(v) : sigmoid(v);
        }
        h = std::move(out);
    }
    return h[0];
}

/// Jet of the network at p with parameters taken from `params`. Each axis is
/// a separate Dual2 sweep with that input designated.
template <class Param>
Jet<Param> jet_generic(const Mlp& shape, std::span<const Param> params, const Point& p) {
    using D = Dual2<Param>;
    auto sweep = [&](Axis axis) {
        const std::array<D, 3> in{lift_input(Param(p.x), axis == Axis::x),
                                  lift_input(Param(p.y), axis == Axis::y),
                                  lift_input(Param(p.t), axis == Axis::t)};
        return forward_generic<Param, D>(shape, params, in);
    };
    const D dx = sweep(Axis::x);
    const D dy = sweep(Axis::y);
    const D dt = sweep(Axis::t);
    return Jet<Param>{dx.value, dx.d1, dx.d2, dy.d1, dy.d2, dt.d1, dt.d2};
}

/// Binary checkpoint; see README for the byte layout. Round trip is exact.
void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path);

/// Throws UsageError if `net` does not have the layer shapes and activation
/// that `config` prescribes.
void require_shape(const Mlp& net, const NetConfig& config);

} // namespace stpinn
