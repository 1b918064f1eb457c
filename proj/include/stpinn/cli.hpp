#pragma once

#include "stpinn/config.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <ostream>

namespace stpinn {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_divergence = 2, exit_io = 3 };

struct TrainOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out; // overrides OUTPUT_DIR
};

struct CheckpointOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
};

// Each command returns an exit code and never throws; errors are reported on
// `err`. Progress and results go to `out`.

/// Writes model.ckpt, convergence.csv, summary.json and config.cfg (the
/// resolved configuration) to the output directory. A diverged run still
/// writes the CSV and summary but no checkpoint.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop = nullptr);

/// Writes metrics.json: the loss breakdown on a fresh grid and, when the
/// problem has an exact solution, error metrics at five times in [0, T].
int cmd_evaluate(const CheckpointOptions& opts, std::ostream& out, std::ostream& err);

/// Writes snapshot_t{t}.csv and .png.
int cmd_snapshot(const CheckpointOptions& opts, double t, std::ostream& out, std::ostream& err);

/// export_frames over arange(0, TOTAL_TIME, dt) into <out>/frames.
int cmd_frames(const CheckpointOptions& opts, double dt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. SIGINT during `train` ends training early
/// and still writes the outputs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stpinn
