#pragma once

#include "stpinn/jet.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace stpinn {

struct DomainBox {
    std::array<double, 2> x{0.0, 1.0};
    std::array<double, 2> y{0.0, 1.0};
    std::array<double, 2> t{0.0, 1.0};

    /// [0, length]^2 x [0, total_time].
    static DomainBox square(double length, double total_time);
    void validate() const;
};

enum class SamplingMode : std::uint8_t { grid, uniform_random };

std::string_view to_string(SamplingMode m);
SamplingMode parse_sampling_mode(std::string_view name);

struct BoundaryFaces {
    PointList down;  // y = y0, mesh over (x, t)
    PointList up;    // y = y1
    PointList left;  // x = x0, mesh over (y, t)
    PointList right; // x = x1
};

struct CollocationSet {
    PointList interior;
    PointList initial;
    BoundaryFaces boundary;
};

/// n endpoint-inclusive samples of [a, b]. The first half counts up from a
/// and the second half down from b, so both endpoints are exact.
std::vector<double> linspace(double a, double b, int n);

/// n^3 points. Grid mode: tensor mesh ordered x outer, then y, then t.
PointList interior_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed);

/// n^2 points on t = t0, x outer then y.
PointList initial_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed);

/// n^2 points per face. down/up mesh (x outer, t inner); left/right mesh
/// (y outer, t inner).
BoundaryFaces boundary_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed);

CollocationSet collocation(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed);

/// Seed for the random point stream of a given epoch.
std::uint64_t epoch_seed(std::uint64_t seed, std::uint64_t epoch);

} // namespace stpinn
