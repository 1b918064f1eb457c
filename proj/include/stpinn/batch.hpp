#pragma once

#include "stpinn/jet.hpp"
#include "stpinn/network.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace stpinn {

/// Batched evaluation of the network jet over a point set, with a matching
/// reverse pass that turns adjoints of the jet channels into a parameter
/// gradient.
///
/// Every activation carries C channel blocks side by side (value plus the
/// requested first/second input derivatives), so each layer is a single
/// matrix product over a units x (C * N) block. Per layer, for a designated
/// input k with pre-activation z and a = sigma(z):
///   a_k  = sigma'(z) z_k
///   a_kk = sigma''(z) z_k^2 + sigma'(z) z_kk
/// The reverse pass differentiates these relations, which needs sigma'''.
///
/// The object keeps its buffers between calls so that repeated evaluation on
/// same-sized batches does not reallocate.
class JetBatch {
public:
    void forward(const Mlp& net, std::span<const Point> points, ChannelSet channels);

    Eigen::Index size() const { return n_; }
    int channel_count() const { return channels_.count(); }
    ChannelSet channels() const { return channels_; }

    /// Row index of a channel in output(); -1 if not computed. Order 0 is the value.
    int index_of(Axis axis, int order) const;

    /// channels x N.
    const Eigen::MatrixXd& output() const { return output_; }

    Jet<double> jet_at(Eigen::Index i) const;

    /// grad += d(sum_c,i adjoint(c,i) * output(c,i)) / d params, in the
    /// flattened parameter order of the network passed to forward().
    void backward(const Eigen::Ref<const Eigen::MatrixXd>& adjoint, Eigen::Ref<Eigen::VectorXd> grad);

    // Activation derivatives at one hidden layer, cached for the reverse pass.
    struct Slopes {
        Eigen::ArrayXXd s1, s2, s3;
    };

private:
    struct AxisBlocks {
        int first = -1;
        int second = -1;
    };

    void activate(std::size_t layer, const Eigen::MatrixXd& z, Eigen::MatrixXd& a);
    void activate_backward(std::size_t layer, Eigen::MatrixXd& g) const;

    const Mlp* net_ = nullptr;
    ChannelSet channels_;
    std::array<AxisBlocks, 3> blocks_{};
    Eigen::Index n_ = 0;

    std::vector<Eigen::MatrixXd> inputs_; // input to layer l, units x (C*N)
    std::vector<Eigen::MatrixXd> pre_;    // pre-activation of hidden layer l
    std::vector<Slopes> slopes_;
    Eigen::MatrixXd output_;
    Eigen::MatrixXd grad_z_;
    Eigen::MatrixXd grad_in_;
};

} // namespace stpinn
