#include "stpinn/network.hpp"

#include "stpinn/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace stpinn {

std::string_view to_string(Activation a) {
    return a == Activation::tanh ? "tanh" : "sigmoid";
}

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw UsageError("unknown activation '" + std::string(name) + "' (expected tanh or sigmoid)");
}

Mlp::Mlp(std::vector<Layer> layers, Activation activation, std::uint64_t seed)
    : layers_(std::move(layers)), activation_(activation), seed_(seed) {
    if (layers_.empty()) throw UsageError("Mlp needs at least one layer");
    if (layers_.front().weight.cols() != 3) throw UsageError("Mlp input dimension must be 3");
    if (layers_.back().weight.rows() != 1) throw UsageError("Mlp output dimension must be 1");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].bias.size() != layers_[l].weight.rows())
            throw UsageError("Mlp layer " + std::to_string(l) + ": bias/weight size mismatch");
        if (l > 0 && layers_[l].weight.cols() != layers_[l - 1].weight.rows())
            throw UsageError("Mlp layer " + std::to_string(l) + ": incompatible input dimension");
    }
}

std::size_t Mlp::num_parameters() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Eigen::VectorXd Mlp::flatten() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_parameters()));
    Eigen::Index k = 0;
    for (const auto& l : layers_) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out[k++] = l.weight(r, c);
        out.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return out;
}

void Mlp::assign(std::span<const double> params) {
    if (params.size() != num_parameters())
        throw UsageError("Mlp::assign: expected " + std::to_string(num_parameters()) +
                         " parameters, got " + std::to_string(params.size()));
    std::size_t k = 0;
    for (auto& l : layers_) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = params[k++];
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = params[k++];
    }
}

bool Mlp::all_finite() const {
    for (const auto& l : layers_)
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
}

void Mlp::scale_output(double c) {
    layers_.back().weight *= c;
    layers_.back().bias *= c;
}

bool Mlp::operator==(const Mlp& other) const {
    if (activation_ != other.activation_ || seed_ != other.seed_ ||
        layers_.size() != other.layers_.size())
        return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& a = layers_[l];
        const auto& b = other.layers_[l];
        if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) return false;
        if (a.weight != b.weight || a.bias != b.bias) return false;
    }
    return true;
}

namespace {

std::vector<std::pair<int, int>> layer_shapes(const NetConfig& c) {
    if (c.num_hidden < 1 || c.dim_hidden < 1)
        throw UsageError("NetConfig: num_hidden and dim_hidden must be >= 1");
    std::vector<std::pair<int, int>> shapes; // (out, in)
    shapes.emplace_back(c.dim_hidden, 3);
    for (int i = 1; i < c.num_hidden; ++i) shapes.emplace_back(c.dim_hidden, c.dim_hidden);
    shapes.emplace_back(1, c.dim_hidden);
    return shapes;
}

} // namespace

Mlp init(const NetConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::vector<Layer> layers;
    for (auto [out, in] : layer_shapes(config)) {
        const double bound = std::sqrt(6.0 / double(in + out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Layer l{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) l.weight(r, c) = dist(rng);
        layers.push_back(std::move(l));
    }
    return Mlp(std::move(layers), config.activation, config.seed);
}

Mlp constant_network(const NetConfig& config, double value) {
    std::vector<Layer> layers;
    for (auto [out, in] : layer_shapes(config))
        layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    layers.back().bias[0] = value;
    return Mlp(std::move(layers), config.activation, config.seed);
}

double eval_f(const Mlp& net, double x, double y, double t) {
    Eigen::VectorXd h(3);
    h << x, y, t;
    const auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::VectorXd z = layers[l].weight * h + layers[l].bias;
        if (l + 1 < layers.size()) {
            if (net.activation() == Activation::tanh)
                z = z.array().tanh().matrix();
            else
                z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
        }
        h = std::move(z);
    }
    return h[0];
}

double eval_derivative(const Mlp& net, double x, double y, double t, Axis wrt, int order) {
    if (order != 1 && order != 2)
        throw UsageError("eval_derivative: order must be 1 or 2, got " + std::to_string(order));
    const Eigen::VectorXd params = net.flatten();
    const std::span<const double> p(params.data(), static_cast<std::size_t>(params.size()));
    const std::array<Dual2<double>, 3> in{lift_input(x, wrt == Axis::x),
                                          lift_input(y, wrt == Axis::y),
                                          lift_input(t, wrt == Axis::t)};
    const auto out = forward_generic<double, Dual2<double>>(net, p, in);
    return order == 1 ? out.d1 : out.d2;
}

Jet<double> eval_jet(const Mlp& net, const Point& pt) {
    const Eigen::VectorXd params = net.flatten();
    return jet_generic<double>(net, {params.data(), static_cast<std::size_t>(params.size())}, pt);
}

void require_shape(const Mlp& net, const NetConfig& config) {
    const auto shapes = layer_shapes(config);
    const auto& layers = net.layers();
    bool ok = layers.size() == shapes.size() && net.activation() == config.activation;
    for (std::size_t l = 0; ok && l < layers.size(); ++l)
        ok = layers[l].weight.rows() == shapes[l].first && layers[l].weight.cols() == shapes[l].second;
    if (!ok)
        throw UsageError("checkpoint does not match the configured network (" +
                         std::to_string(config.num_hidden) + " hidden x " +
                         std::to_string(config.dim_hidden) + ", " +
                         std::string(to_string(config.activation)) + ")");
}

// Checkpoint layout, all integers and doubles little-endian:
//   char[8]  magic "STPINN01"
//   u8       activation (0 tanh, 1 sigmoid)
//   u64      seed
//   u32      layer count L
//   L x { u32 rows, u32 cols }
//   f64...   parameters in flattened order (per layer: weight row-major, bias)
namespace {

constexpr char kMagic[8] = {'S', 'T', 'P', 'I', 'N', 'N', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw IoError("truncated checkpoint: " + path.string());
    return v;
}

} // namespace

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, sizeof kMagic);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(net.activation()));
    put<std::uint64_t>(os, net.seed());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers().size()));
    for (const auto& l : net.layers()) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(l.weight.rows()));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(l.weight.cols()));
    }
    const Eigen::VectorXd params = net.flatten();
    os.write(reinterpret_cast<const char*>(params.data()),
             static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!os) throw IoError("failed writing checkpoint: " + path.string());
}

Mlp load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("not a checkpoint file: " + path.string());
    const auto act = get<std::uint8_t>(is, path);
    if (act > 1) throw IoError("unknown activation tag in checkpoint: " + path.string());
    const auto seed = get<std::uint64_t>(is, path);
    const auto count = get<std::uint32_t>(is, path);
    if (count == 0 || count > 4096) throw IoError("bad layer count in checkpoint: " + path.string());
    std::vector<Layer> layers;
    for (std::uint32_t l = 0; l < count; ++l) {
        const auto rows = get<std::uint32_t>(is, path);
        const auto cols = get<std::uint32_t>(is, path);
        if (rows == 0 || cols == 0 || rows > (1u << 16) || cols > (1u << 16))
            throw IoError("bad layer shape in checkpoint: " + path.string());
        layers.push_back({Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)});
    }
    try {
        Mlp net(std::move(layers), static_cast<Activation>(act), seed);
        std::vector<double> params(net.num_parameters());
        if (!is.read(reinterpret_cast<char*>(params.data()),
                     static_cast<std::streamsize>(params.size() * sizeof(double))))
            throw IoError("truncated checkpoint: " + path.string());
        if (is.peek() != std::char_traits<char>::eof())
            throw IoError("trailing bytes in checkpoint: " + path.string());
        net.assign(params);
        return net;
    } catch (const UsageError& e) {
        throw IoError("inconsistent checkpoint " + path.string() + ": " + e.what());
    }
}

} // namespace stpinn
