#include "stpinn/sampling.hpp"

#include "stpinn/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace stpinn {

DomainBox DomainBox::square(double length, double total_time) {
    DomainBox b{{0.0, length}, {0.0, length}, {0.0, total_time}};
    b.validate();
    return b;
}

void DomainBox::validate() const {
    auto check = [](const std::array<double, 2>& r, const char* axis) {
        if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || !(r[0] < r[1]))
            throw UsageError(std::string("domain box: need finite ") + axis + "0 < " + axis + "1");
    };
    check(x, "x");
    check(y, "y");
    check(t, "t");
}

std::string_view to_string(SamplingMode m) {
    return m == SamplingMode::grid ? "grid" : "uniform_random";
}

SamplingMode parse_sampling_mode(std::string_view name) {
    if (name == "grid") return SamplingMode::grid;
    if (name == "uniform_random" || name == "random") return SamplingMode::uniform_random;
    throw UsageError("unknown sampling mode '" + std::string(name) +
                     "' (expected grid or uniform_random)");
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw UsageError("linspace: need at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / double(n - 1);
    const int halfway = n / 2;
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = i < halfway ? a + step * i : b - step * (n - i - 1);
    return out;
}

namespace {

enum Stream : std::uint64_t { kInterior = 1, kInitial = 2, kBoundary = 3 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream)};
    return std::mt19937_64(seq);
}

double draw(std::mt19937_64& rng, const std::array<double, 2>& r) {
    return std::uniform_real_distribution<double>(r[0], r[1])(rng);
}

void check_count(int n, SamplingMode mode) {
    if (mode == SamplingMode::grid && n < 2)
        throw UsageError("grid sampling needs n >= 2, got " + std::to_string(n));
    if (n < 1) throw UsageError("sampling needs n >= 1, got " + std::to_string(n));
}

std::size_t sq(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

} // namespace

PointList interior_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed) {
    box.validate();
    check_count(n, mode);
    PointList pts;
    pts.reserve(sq(n) * static_cast<std::size_t>(n));
    if (mode == SamplingMode::grid) {
        const auto xs = linspace(box.x[0], box.x[1], n);
        const auto ys = linspace(box.y[0], box.y[1], n);
        const auto ts = linspace(box.t[0], box.t[1], n);
        for (double x : xs)
            for (double y : ys)
                for (double t : ts) pts.push_back({x, y, t});
    } else {
        auto rng = stream_rng(seed, kInterior);
        for (std::size_t i = 0; i < sq(n) * static_cast<std::size_t>(n); ++i) {
            const double x = draw(rng, box.x);
            const double y = draw(rng, box.y);
            const double t = draw(rng, box.t);
            pts.push_back({x, y, t});
        }
    }
    return pts;
}

PointList initial_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed) {
    box.validate();
    check_count(n, mode);
    PointList pts;
    pts.reserve(sq(n));
    const double t0 = box.t[0];
    if (mode == SamplingMode::grid) {
        const auto xs = linspace(box.x[0], box.x[1], n);
        const auto ys = linspace(box.y[0], box.y[1], n);
        for (double x : xs)
            for (double y : ys) pts.push_back({x, y, t0});
    } else {
        auto rng = stream_rng(seed, kInitial);
        for (std::size_t i = 0; i < sq(n); ++i) {
            const double x = draw(rng, box.x);
            const double y = draw(rng, box.y);
            pts.push_back({x, y, t0});
        }
    }
    return pts;
}

BoundaryFaces boundary_points(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed) {
    box.validate();
    check_count(n, mode);
    BoundaryFaces f;
    for (auto* face : {&f.down, &f.up, &f.left, &f.right}) face->reserve(sq(n));
    if (mode == SamplingMode::grid) {
        const auto xs = linspace(box.x[0], box.x[1], n);
        const auto ys = linspace(box.y[0], box.y[1], n);
        const auto ts = linspace(box.t[0], box.t[1], n);
        for (double x : xs)
            for (double t : ts) {
                f.down.push_back({x, box.y[0], t});
                f.up.push_back({x, box.y[1], t});
            }
        for (double y : ys)
            for (double t : ts) {
                f.left.push_back({box.x[0], y, t});
                f.right.push_back({box.x[1], y, t});
            }
    } else {
        auto rng = stream_rng(seed, kBoundary);
        for (std::size_t i = 0; i < sq(n); ++i) {
            const double x = draw(rng, box.x);
            const double t = draw(rng, box.t);
            f.down.push_back({x, box.y[0], t});
        }
        for (std::size_t i = 0; i < sq(n); ++i) {
            const double x = draw(rng, box.x);
            const double t = draw(rng, box.t);
            f.up.push_back({x, box.y[1], t});
        }
        for (std::size_t i = 0; i < sq(n); ++i) {
            const double y = draw(rng, box.y);
            const double t = draw(rng, box.t);
            f.left.push_back({box.x[0], y, t});
        }
        for (std::size_t i = 0; i < sq(n); ++i) {
            const double y = draw(rng, box.y);
            const double t = draw(rng, box.t);
            f.right.push_back({box.x[1], y, t});
        }
    }
    return f;
}

CollocationSet collocation(const DomainBox& box, int n, SamplingMode mode, std::uint64_t seed) {
    return {interior_points(box, n, mode, seed), initial_points(box, n, mode, seed),
            boundary_points(box, n, mode, seed)};
}

std::uint64_t epoch_seed(std::uint64_t seed, std::uint64_t epoch) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (epoch + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace stpinn
