#pragma once

#include "stpinn/batch.hpp"
#include "stpinn/loss_weights.hpp"
#include "stpinn/network.hpp"
#include "stpinn/problems.hpp"
#include "stpinn/sampling.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>

namespace stpinn {

/// A scalar loss and, when requested, its gradient with respect to the
/// flattened network parameters (empty otherwise).
struct LossValue {
    double value = 0.0;
    Eigen::VectorXd gradient;
};

/// Unweighted component losses and the weighted total.
struct LossBreakdown {
    double total = 0.0;
    double residual = 0.0;
    double initial = 0.0;
    double boundary = 0.0;
};

struct TotalLoss {
    LossBreakdown breakdown;
    Eigen::VectorXd gradient; // of breakdown.total
};

/// Reusable evaluation buffers. Passing the same workspace across epochs
/// avoids reallocating the per-layer activations every step.
struct LossWorkspace {
    JetBatch interior;
    JetBatch initial;
    std::array<JetBatch, 4> faces;
};

enum class Gradient : bool { skip = false, compute = true };

/// mean over pts of residual(net, p)^2. A non-finite residual throws
/// DivergenceError naming the point.
LossValue residual_loss(const Mlp& net, const ProblemSpec& problem, std::span<const Point> pts,
                        Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// mean over pts of (net(p) - u0(p.x, p.y))^2.
LossValue initial_loss(const Mlp& net, const ProblemSpec& problem, std::span<const Point> pts,
                       Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// Sum over the four faces of the mean squared axis derivative: du/dy on
/// down/up, du/dx on left/right.
LossValue boundary_loss_neumann(const Mlp& net, const BoundaryFaces& faces,
                                Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// Sum over the four faces of the mean squared trace value.
LossValue boundary_loss_dirichlet(const Mlp& net, const BoundaryFaces& faces,
                                  Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// Dispatches on problem.boundary.
LossValue boundary_loss(const Mlp& net, const ProblemSpec& problem, const BoundaryFaces& faces,
                        Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// Contribution of a single face (0 down, 1 up, 2 left, 3 right).
LossValue face_loss(const Mlp& net, BoundaryKind kind, int face, std::span<const Point> pts,
                    Gradient mode = Gradient::compute, LossWorkspace* ws = nullptr);

/// w_r * residual + w_i * initial + w_b * boundary and its gradient.
TotalLoss total_loss(const Mlp& net, const ProblemSpec& problem, const LossWeights& weights,
                     const CollocationSet& sets, Gradient mode = Gradient::compute,
                     LossWorkspace* ws = nullptr);

} // namespace stpinn
