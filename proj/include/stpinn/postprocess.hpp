#pragma once

#include "stpinn/network.hpp"
#include "stpinn/problems.hpp"
#include "stpinn/sampling.hpp"
#include "stpinn/training.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace stpinn {

/// Element k is the mean of series[max(0, k - window + 1) .. k].
std::vector<double> running_average(std::span<const double> series, int window);

/// Network values on the endpoint-inclusive nx x ny spatial mesh at time t.
/// values[i * ny + j] = u(xs[i], ys[j], t).
struct SnapshotGrid {
    double t = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i * ny + j)]; }
};

SnapshotGrid snapshot(const Mlp& net, const DomainBox& box, double t, int n_plot);

/// Same mesh as snapshot(), filled from a closed-form field.
SnapshotGrid sample_field(const Field3& f, const DomainBox& box, double t, int n_plot);

struct ErrorMetrics {
    double mse = 0.0;
    double max_abs = 0.0;
    double rel_l2 = 0.0;
    std::size_t points = 0;
};

/// Errors against problem.exact, aggregated over the grids at every t.
ErrorMetrics error_vs_exact(const Mlp& net, const ProblemSpec& problem, const DomainBox& box,
                            std::span<const double> t_samples, int n_plot);

/// numpy-style arange: start + k * step for k < ceil((stop - start) / step).
std::vector<double> arange(double start, double stop, double step);

/// Writes img_{idx:03}.png and img_{idx:03}.csv for each time. One linear
/// colour scale spans the global min/max of all frames.
std::vector<std::filesystem::path> export_frames(const Mlp& net, const DomainBox& box,
                                                 std::span<const double> times, int n_plot,
                                                 const std::filesystem::path& out_dir);

// File writers. All throw IoError when the target cannot be written.

/// Header `epoch,total,residual,initial,boundary`, epochs numbered from 1.
void write_convergence_csv(const TrainReport& report, const std::filesystem::path& path);
/// Header `x,y,u`, rows in grid order.
void write_snapshot_csv(const SnapshotGrid& grid, const std::filesystem::path& path);
/// 8-bit RGB image, x to the right and y upwards, colours scaled to [lo, hi].
void write_png(const SnapshotGrid& grid, double lo, double hi, const std::filesystem::path& path);

/// Colour map lookup for s in [0, 1].
std::array<std::uint8_t, 3> colormap(double s);

} // namespace stpinn
