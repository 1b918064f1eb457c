#pragma once

#include "stpinn/loss_weights.hpp"
#include "stpinn/network.hpp"
#include "stpinn/problems.hpp"
#include "stpinn/sampling.hpp"
#include "stpinn/training.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace stpinn {

/// Everything a run needs. Field defaults come from the selected problem's
/// parameter listing; a config file only has to name the problem.
struct RunConfig {
    std::string problem = "heat";
    double length = 1.0;
    double total_time = 1.0;
    int n_points = 15;
    int n_points_plot = 150;
    LossWeights weights;
    int layers = 4;
    int neurons = 80;
    Activation activation = Activation::tanh;
    int epochs = 20000;
    double learning_rate = 0.002;
    SamplingMode sampling = SamplingMode::grid;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    ProblemCoefficients coefficients;
    TrainMode mode = TrainMode::full_batch;
    std::optional<double> stop_loss;
    int report_every = 1000;

    static RunConfig defaults_for(std::string_view problem);

    DomainBox box() const { return DomainBox::square(length, total_time); }
    NetConfig net() const { return {layers, neurons, activation, seed}; }
    TrainConfig train_config() const;
    ProblemSpec problem_spec() const;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parses the key-value format:
///
///     # comment
///     PROBLEM = "wave"
///     LENGTH = 2.
///     EPOCHS = 150_000
///     [wave]
///     GRAVITY = 9.81
///
/// Keys are case-insensitive. Problem coefficients (EPSILON, GRAVITY, KX, KY,
/// RHO) may appear at top level or in a table named after their problem;
/// tables for other problems are checked but ignored.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// Applies PINN_SEED from the environment, if set.
void apply_env_overrides(RunConfig& c);

} // namespace stpinn
