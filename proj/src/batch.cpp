#include "stpinn/batch.hpp"

#include "stpinn/error.hpp"

namespace stpinn {

namespace {

using Eigen::ArrayXXd;
using Eigen::Index;

// First three derivatives of sigma, all expressed through v = sigma(z).
template <class V>
void slopes(Activation act, const V& v, JetBatch::Slopes& s) {
    if (act == Activation::tanh) {
        s.s1 = 1.0 - v.square();
        s.s2 = -2.0 * v * s.s1;
        s.s3 = s.s1 * (4.0 * v.square() - 2.0 * s.s1);
    } else {
        s.s1 = v * (1.0 - v);
        s.s2 = s.s1 * (1.0 - 2.0 * v);
        s.s3 = s.s2 * (1.0 - 2.0 * v) - 2.0 * s.s1.square();
    }
}

} // namespace

int JetBatch::index_of(Axis axis, int order) const {
    if (order == 0) return 0;
    const auto& b = blocks_[static_cast<int>(axis)];
    return order == 1 ? b.first : order == 2 ? b.second : -1;
}

Jet<double> JetBatch::jet_at(Index i) const {
    auto get = [&](Axis a, int order) {
        const int c = index_of(a, order);
        return c < 0 ? 0.0 : output_(c, i);
    };
    return {output_(0, i),   get(Axis::x, 1), get(Axis::x, 2), get(Axis::y, 1),
            get(Axis::y, 2), get(Axis::t, 1), get(Axis::t, 2)};
}

void JetBatch::forward(const Mlp& net, std::span<const Point> points, ChannelSet channels) {
    if (points.empty()) throw UsageError("JetBatch::forward: empty point set");
    net_ = &net;
    channels_ = channels;
    n_ = static_cast<Index>(points.size());

    int next = 1;
    for (int a = 0; a < 3; ++a) {
        blocks_[a] = {};
        if (channels.first(Axis(a))) blocks_[a].first = next++;
        if (channels.second(Axis(a))) blocks_[a].second = next++;
    }
    const int c_count = next;
    const Index width = c_count * n_;
    const auto& layers = net.layers();

    inputs_.resize(layers.size());
    pre_.resize(layers.size() - 1);
    slopes_.resize(layers.size() - 1);

    auto& in0 = inputs_[0];
    in0.setZero(3, width);
    for (Index i = 0; i < n_; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        in0(0, i) = p.x;
        in0(1, i) = p.y;
        in0(2, i) = p.t;
    }
    for (int a = 0; a < 3; ++a) {
        if (blocks_[a].first >= 0) in0.block(a, blocks_[a].first * n_, 1, n_).setOnes();
    }

    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const bool last = l + 1 == layers.size();
        Eigen::MatrixXd& z = last ? output_ : pre_[l];
        z.resize(layer.weight.rows(), width);
        z.noalias() = layer.weight * inputs_[l];
        z.leftCols(n_).colwise() += layer.bias;
        if (!last) activate(l, z, inputs_[l + 1]);
    }
    // Output layer has one unit; lay the channel blocks out as rows.
    output_ = Eigen::Map<const Eigen::MatrixXd>(output_.data(), n_, c_count).transpose().eval();
}

void JetBatch::activate(std::size_t layer, const Eigen::MatrixXd& z, Eigen::MatrixXd& a) {
    a.resize(z.rows(), z.cols());
    auto v = a.leftCols(n_).array();
    const auto zv = z.leftCols(n_).array();
    // Both through the vectorised exp. tanh(z) = 1 - 2 / (exp(2z) + 1) keeps the
    // absolute error at rounding level and saturates cleanly at +-1.
    if (net_->activation() == Activation::tanh)
        v = 1.0 - 2.0 / ((2.0 * zv).exp() + 1.0);
    else
        v = 1.0 / (1.0 + (-zv).exp());
    Slopes& s = slopes_[layer];
    slopes(net_->activation(), v, s);
    for (const auto& b : blocks_) {
        if (b.first < 0) continue;
        const auto zk = z.middleCols(b.first * n_, n_).array();
        a.middleCols(b.first * n_, n_).array() = s.s1 * zk;
        if (b.second >= 0) {
            const auto zkk = z.middleCols(b.second * n_, n_).array();
            a.middleCols(b.second * n_, n_).array() = s.s2 * zk.square() + s.s1 * zkk;
        }
    }
}

// On entry g holds the adjoint of the activated output of hidden layer
// `layer`; on exit it holds the adjoint of that layer's pre-activation.
void JetBatch::activate_backward(std::size_t layer, Eigen::MatrixXd& g) const {
    const Eigen::MatrixXd& z = pre_[layer];
    const Slopes& s = slopes_[layer];

    auto g_value = g.leftCols(n_).array();
    g_value *= s.s1;
    for (const auto& b : blocks_) {
        if (b.first < 0) continue;
        const auto zk = z.middleCols(b.first * n_, n_).array();
        auto gk = g.middleCols(b.first * n_, n_).array();
        if (b.second >= 0) {
            const auto zkk = z.middleCols(b.second * n_, n_).array();
            auto gkk = g.middleCols(b.second * n_, n_).array();
            g_value += gk * s.s2 * zk + gkk * (s.s3 * zk.square() + s.s2 * zkk);
            gk = gk * s.s1 + 2.0 * gkk * s.s2 * zk;
            gkk = gkk * s.s1;
        } else {
            g_value += gk * s.s2 * zk;
            gk = gk * s.s1;
        }
    }
}

void JetBatch::backward(const Eigen::Ref<const Eigen::MatrixXd>& adjoint,
                        Eigen::Ref<Eigen::VectorXd> grad) {
    if (!net_) throw UsageError("JetBatch::backward before forward");
    const int c_count = channel_count();
    if (adjoint.rows() != c_count || adjoint.cols() != n_)
        throw UsageError("JetBatch::backward: adjoint shape does not match the batch");
    const auto& layers = net_->layers();

    std::vector<Index> offset(layers.size());
    Index k = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        offset[l] = k;
        k += layers[l].weight.size() + layers[l].bias.size();
    }
    if (grad.size() != k) throw UsageError("JetBatch::backward: gradient size mismatch");

    grad_z_.resize(1, c_count * n_);
    for (int c = 0; c < c_count; ++c) grad_z_.middleCols(c * n_, n_) = adjoint.row(c);

    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& w = layers[l].weight;
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<RowMajor> gw(grad.data() + offset[l], w.rows(), w.cols());
        gw.noalias() += grad_z_ * inputs_[l].transpose();
        grad.segment(offset[l] + w.size(), w.rows()) += grad_z_.leftCols(n_).rowwise().sum();
        if (l == 0) break;
        grad_in_.resize(w.cols(), grad_z_.cols());
        grad_in_.noalias() = w.transpose() * grad_z_;
        activate_backward(l - 1, grad_in_);
        grad_z_.swap(grad_in_);
    }
}

} // namespace stpinn
