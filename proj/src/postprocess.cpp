#include "stpinn/postprocess.hpp"

#include "stpinn/batch.hpp"
#include "stpinn/error.hpp"

#include <fmt/format.h>
#include <fmt/os.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace stpinn {

namespace fs = std::filesystem;

std::vector<double> running_average(std::span<const double> series, int window) {
    if (window < 1) throw UsageError("running_average: window must be >= 1");
    std::vector<double> out(series.size());
    const auto w = static_cast<std::size_t>(window);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::size_t first = k + 1 >= w ? k + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t j = first; j <= k; ++j) sum += series[j];
        out[k] = sum / double(k - first + 1);
    }
    return out;
}

namespace {

SnapshotGrid empty_grid(const DomainBox& box, double t, int n_plot) {
    box.validate();
    if (n_plot < 2) throw UsageError("snapshot: n_plot must be >= 2");
    SnapshotGrid g;
    g.t = t;
    g.nx = g.ny = n_plot;
    g.xs = linspace(box.x[0], box.x[1], n_plot);
    g.ys = linspace(box.y[0], box.y[1], n_plot);
    g.values.resize(static_cast<std::size_t>(n_plot) * static_cast<std::size_t>(n_plot));
    return g;
}

} // namespace

SnapshotGrid snapshot(const Mlp& net, const DomainBox& box, double t, int n_plot) {
    SnapshotGrid g = empty_grid(box, t, n_plot);
    if (!(t >= box.t[0] && t <= box.t[1]))
        throw UsageError(fmt::format("snapshot: t = {} outside [{}, {}]", t, box.t[0], box.t[1]));
    PointList pts;
    pts.reserve(g.values.size());
    for (double x : g.xs)
        for (double y : g.ys) pts.push_back({x, y, t});
    JetBatch batch;
    batch.forward(net, pts, ChannelSet());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double u = batch.output()(0, static_cast<Eigen::Index>(k));
        if (!std::isfinite(u))
            throw DivergenceError(fmt::format("non-finite network output {} at (x={}, y={}, t={})",
                                              u, pts[k].x, pts[k].y, t));
        g.values[k] = u;
    }
    return g;
}

SnapshotGrid sample_field(const Field3& f, const DomainBox& box, double t, int n_plot) {
    SnapshotGrid g = empty_grid(box, t, n_plot);
    std::size_t k = 0;
    for (double x : g.xs)
        for (double y : g.ys) g.values[k++] = f(x, y, t);
    return g;
}

ErrorMetrics error_vs_exact(const Mlp& net, const ProblemSpec& problem, const DomainBox& box,
                            std::span<const double> t_samples, int n_plot) {
    if (!problem.has_exact())
        throw UsageError("error_vs_exact: problem '" + problem.name + "' has no exact solution");
    if (t_samples.empty()) throw UsageError("error_vs_exact: no time samples");
    ErrorMetrics m;
    double sq_err = 0.0;
    double sq_exact = 0.0;
    for (double t : t_samples) {
        const SnapshotGrid u = snapshot(net, box, t, n_plot);
        const SnapshotGrid e = sample_field(problem.exact, box, t, n_plot);
        for (std::size_t k = 0; k < u.values.size(); ++k) {
            const double d = u.values[k] - e.values[k];
            sq_err += d * d;
            sq_exact += e.values[k] * e.values[k];
            m.max_abs = std::max(m.max_abs, std::abs(d));
        }
        m.points += u.values.size();
    }
    m.mse = sq_err / double(m.points);
    m.rel_l2 = std::sqrt(sq_err) / std::sqrt(sq_exact);
    return m;
}

std::vector<double> arange(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw UsageError("arange: step must be > 0");
    const double span = (stop - start) / step;
    const auto n = span > 0.0 ? static_cast<std::size_t>(std::ceil(span)) : 0;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = start + double(k) * step;
    return out;
}

std::array<std::uint8_t, 3> colormap(double s) {
    // Five-stop approximation of a perceptually ordered blue-green-yellow map.
    static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                 {59, 82, 139},
                                                                 {33, 145, 140},
                                                                 {94, 201, 98},
                                                                 {253, 231, 37}}};
    if (!(s > 0.0)) s = 0.0;
    if (s > 1.0) s = 1.0;
    const double pos = s * double(stops.size() - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
    const double f = pos - double(lo);
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<std::uint8_t>(
            std::lround(stops[lo][c] + f * (stops[lo + 1][c] - stops[lo][c])));
    return rgb;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.append(type, 4);
    out += data;
    const auto* bytes = reinterpret_cast<const Bytef*>(out.data() + start);
    put_u32(out, static_cast<std::uint32_t>(crc32(0L, bytes, static_cast<uInt>(out.size() - start))));
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("failed writing: " + path.string());
}

} // namespace

void write_png(const SnapshotGrid& g, double lo, double hi, const fs::path& path) {
    const auto w = static_cast<std::size_t>(g.nx);
    const auto h = static_cast<std::size_t>(g.ny);
    std::string raw;
    raw.reserve(h * (1 + 3 * w));
    const double range = hi - lo;
    for (std::size_t row = 0; row < h; ++row) {
        raw.push_back('\0'); // filter: none
        const int j = static_cast<int>(h - 1 - row);
        for (std::size_t i = 0; i < w; ++i) {
            const double s = range > 0.0 ? (g.at(static_cast<int>(i), j) - lo) / range : 0.0;
            for (auto c : colormap(s)) raw.push_back(static_cast<char>(c));
        }
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::string z(zlen, '\0');
    if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw IoError("zlib compression failed for " + path.string());
    z.resize(zlen);

    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(w));
    put_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr += std::string{8, 2, 0, 0, 0}; // 8-bit, truecolour, deflate, no filter, no interlace

    std::string png("\x89PNG\r\n\x1a\n", 8);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", z);
    put_chunk(png, "IEND", {});
    write_file(path, png);
}

void write_snapshot_csv(const SnapshotGrid& g, const fs::path& path) {
    std::string out = "x,y,u\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            out += fmt::format("{},{},{}\n", g.xs[static_cast<std::size_t>(i)],
                               g.ys[static_cast<std::size_t>(j)], g.at(i, j));
    write_file(path, out);
}

void write_convergence_csv(const TrainReport& r, const fs::path& path) {
    std::string out = "epoch,total,residual,initial,boundary\n";
    for (std::size_t k = 0; k < r.epochs(); ++k)
        out += fmt::format("{},{},{},{},{}\n", k + 1, r.total[k], r.residual[k], r.initial[k],
                           r.boundary[k]);
    write_file(path, out);
}

std::vector<fs::path> export_frames(const Mlp& net, const DomainBox& box,
                                    std::span<const double> times, int n_plot,
                                    const fs::path& out_dir) {
    std::vector<fs::path> files;
    if (times.empty()) return files;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());

    std::vector<SnapshotGrid> grids;
    grids.reserve(times.size());
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double t : times) {
        grids.push_back(snapshot(net, box, t, n_plot));
        const auto [mn, mx] = std::minmax_element(grids.back().values.begin(), grids.back().values.end());
        lo = std::min(lo, *mn);
        hi = std::max(hi, *mx);
    }
    for (std::size_t idx = 0; idx < grids.size(); ++idx) {
        const fs::path png = out_dir / fmt::format("img_{:03d}.png", idx);
        const fs::path csv = out_dir / fmt::format("img_{:03d}.csv", idx);
        write_png(grids[idx], lo, hi, png);
        write_snapshot_csv(grids[idx], csv);
        files.push_back(png);
        files.push_back(csv);
    }
    return files;
}

} // namespace stpinn
