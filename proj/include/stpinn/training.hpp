#pragma once

#include "stpinn/losses.hpp"
#include "stpinn/network.hpp"
#include "stpinn/problems.hpp"
#include "stpinn/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stpinn {

struct AdamState {
    std::uint64_t step = 0;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState fresh(Eigen::Index n, double lr);
};

/// One bias-corrected Adam update in place. A non-finite gradient entry
/// throws DivergenceError naming `epoch` and the parameter index, before
/// anything is modified.
void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads, std::uint64_t epoch = 0);

enum class TrainMode : std::uint8_t {
    full_batch, // one weighted total loss over every collocation point per epoch
    sgd_sketch  // per epoch: one random point each for residual, boundary, initial; plain SGD
};

std::string_view to_string(TrainMode m);
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
    DomainBox box;
    int n_points = 15;
    SamplingMode sampling = SamplingMode::grid;
    std::uint64_t seed = 0;
    LossWeights weights;
    int epochs = 1000;
    double learning_rate = 1e-3;
    TrainMode mode = TrainMode::full_batch;
    std::optional<double> stop_loss; // stop once the total loss is <= this
    int report_every = 1000;
};

enum class TrainStatus : std::uint8_t { completed, interrupted, reached_threshold, diverged };

std::string_view to_string(TrainStatus s);

struct TrainReport {
    std::vector<double> total;
    std::vector<double> residual;
    std::vector<double> initial;
    std::vector<double> boundary;
    std::vector<double> block_seconds; // wall time of each reporting block
    double wall_seconds = 0.0;
    TrainStatus status = TrainStatus::completed;
    std::string message; // divergence diagnostic

    std::size_t epochs() const { return total.size(); }
};

struct TrainResult {
    Mlp net;
    TrainReport report;
};

struct Progress {
    std::uint64_t epoch = 0; // 1-based
    LossBreakdown loss;
    double block_seconds = 0.0;
};

struct TrainHooks {
    /// Called every report_every epochs on the training thread.
    std::function<void(const Progress&)> on_progress;
    /// Polled before each epoch; returning true ends training with the
    /// history collected so far.
    std::function<bool()> should_stop;
};

/// `Epoch: n - Loss: t, Residual Loss: r, Initial Loss: i, Boundary Loss: b`
/// with six decimals.
std::string format_progress(const Progress& p);

TrainResult train(Mlp net, const ProblemSpec& problem, const TrainConfig& config,
                  const TrainHooks& hooks = {});

} // namespace stpinn
