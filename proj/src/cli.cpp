#include "stpinn/cli.hpp"

#include "stpinn/error.hpp"
#include "stpinn/postprocess.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <fstream>

namespace stpinn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Maps the error taxonomy onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_divergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

RunConfig resolve(const fs::path& path, const std::optional<fs::path>& out) {
    RunConfig c = load_config(path);
    apply_env_overrides(c);
    if (out) c.output_dir = out->string();
    return c;
}

fs::path ensure_dir(const std::string& dir) {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory " + p.string());
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw IoError("failed writing: " + path.string());
}

json breakdown_json(const LossBreakdown& b) {
    return {{"total", b.total}, {"residual", b.residual}, {"initial", b.initial}, {"boundary", b.boundary}};
}

// json cannot hold non-finite numbers; those become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Mlp load_for(const RunConfig& c, const fs::path& checkpoint) {
    Mlp net = load_checkpoint(checkpoint);
    require_shape(net, c.net());
    return net;
}

} // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop) {
    return guarded(err, [&] {
        const RunConfig c = resolve(opts.config, opts.out);
        const fs::path dir = ensure_dir(c.output_dir);
        const ProblemSpec problem = c.problem_spec();

        TrainHooks hooks;
        hooks.on_progress = [&out](const Progress& p) {
            out << format_progress(p) << std::endl;
        };
        if (stop) hooks.should_stop = [stop] { return stop->load(); };

        const TrainResult r = train(init(c.net()), problem, c.train_config(), hooks);
        const TrainReport& rep = r.report;

        write_convergence_csv(rep, dir / "convergence.csv");
        write_text(dir / "config.cfg", serialize_config(c));
        const bool diverged = rep.status == TrainStatus::diverged;
        if (!diverged) save_checkpoint(r.net, dir / "model.ckpt");

        json summary{{"problem", c.problem},
                     {"status", std::string(to_string(rep.status))},
                     {"epochs_requested", c.epochs},
                     {"epochs_run", rep.epochs()},
                     {"seed", c.seed},
                     {"wall_seconds", rep.wall_seconds},
                     {"parameters", r.net.num_parameters()}};
        if (rep.epochs() > 0) {
            const std::size_t k = rep.epochs() - 1;
            summary["final_loss"] = {{"total", number(rep.total[k])},
                                     {"residual", number(rep.residual[k])},
                                     {"initial", number(rep.initial[k])},
                                     {"boundary", number(rep.boundary[k])}};
        }
        if (!rep.message.empty()) summary["message"] = rep.message;
        write_text(dir / "summary.json", summary.dump(2) + "\n");

        out << fmt::format("{}: {} after {} epochs in {:.2f} s -> {}\n", c.problem, to_string(rep.status),
                           rep.epochs(), rep.wall_seconds, dir.string());
        if (diverged) {
            err << "error: training diverged: " << rep.message << '\n';
            return int(exit_divergence);
        }
        return int(exit_ok);
    });
}

int cmd_evaluate(const CheckpointOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = resolve(opts.config, opts.out);
        const Mlp net = load_for(c, opts.checkpoint);
        const ProblemSpec problem = c.problem_spec();
        const DomainBox box = c.box();

        // Fresh grid: interleaves the training nodes so no point is reused.
        const int n_fresh = 2 * c.n_points - 1;
        const CollocationSet sets = collocation(box, n_fresh, SamplingMode::grid, c.seed);
        const LossBreakdown loss = total_loss(net, problem, c.weights, sets, Gradient::skip).breakdown;

        json metrics{{"problem", c.problem}, {"fresh_grid_points", n_fresh}, {"loss", breakdown_json(loss)}};
        out << fmt::format("loss on {}^3 grid: total {:.6e}, residual {:.6e}, initial {:.6e}, boundary {:.6e}\n",
                           n_fresh, loss.total, loss.residual, loss.initial, loss.boundary);
        if (problem.has_exact()) {
            const std::vector<double> ts = linspace(box.t[0], box.t[1], 5);
            json per_t = json::array();
            for (double t : ts) {
                const ErrorMetrics m = error_vs_exact(net, problem, box, std::span(&t, 1), c.n_points_plot);
                per_t.push_back({{"t", t}, {"mse", m.mse}, {"max_abs", m.max_abs}, {"rel_l2", m.rel_l2}});
                out << fmt::format("t = {:.4f}: mse {:.6e}, max_abs {:.6e}, rel_l2 {:.6e}\n", t, m.mse,
                                   m.max_abs, m.rel_l2);
            }
            const ErrorMetrics all = error_vs_exact(net, problem, box, ts, c.n_points_plot);
            metrics["error"] = {{"n_plot", c.n_points_plot},
                                {"mse", all.mse},
                                {"max_abs", all.max_abs},
                                {"rel_l2", all.rel_l2},
                                {"per_time", per_t}};
            out << fmt::format("overall: mse {:.6e}, max_abs {:.6e}, rel_l2 {:.6e}\n", all.mse, all.max_abs,
                               all.rel_l2);
        }
        const fs::path dir = ensure_dir(c.output_dir);
        write_text(dir / "metrics.json", metrics.dump(2) + "\n");
        return int(exit_ok);
    });
}

int cmd_snapshot(const CheckpointOptions& opts, double t, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = resolve(opts.config, opts.out);
        const Mlp net = load_for(c, opts.checkpoint);
        const SnapshotGrid g = snapshot(net, c.box(), t, c.n_points_plot);
        const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
        const fs::path dir = ensure_dir(c.output_dir);
        const std::string stem = fmt::format("snapshot_t{:.4f}", t);
        write_snapshot_csv(g, dir / (stem + ".csv"));
        write_png(g, *lo, *hi, dir / (stem + ".png"));
        out << fmt::format("t = {}: u in [{:.6g}, {:.6g}] -> {}\n", t, *lo, *hi, (dir / stem).string());
        return int(exit_ok);
    });
}

int cmd_frames(const CheckpointOptions& opts, double dt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("--dt must be > 0");
        const RunConfig c = resolve(opts.config, opts.out);
        const Mlp net = load_for(c, opts.checkpoint);
        const DomainBox box = c.box();
        const std::vector<double> times = arange(box.t[0], box.t[1], dt);
        const fs::path dir = fs::path(c.output_dir) / "frames";
        const auto files = export_frames(net, box, times, c.n_points_plot, dir);
        out << fmt::format("{} frames -> {}\n", times.size(), dir.string());
        (void)files;
        return int(exit_ok);
    });
}

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Physics-informed neural network solver for 2D time-dependent PDEs"};
    app.require_subcommand(1);

    TrainOptions train_opts;
    std::string train_out;
    auto* train_cmd = app.add_subcommand("train", "Train a network from a config file");
    train_cmd->add_option("--config", train_opts.config, "Config file")->required();
    train_cmd->add_option("--out", train_out, "Output directory (overrides OUTPUT_DIR)");

    CheckpointOptions ck;
    std::string ck_out;
    double t = 0.0;
    double dt = 0.01;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--checkpoint", ck.checkpoint, "Checkpoint written by train")->required();
        sub->add_option("--config", ck.config, "Config file")->required();
        sub->add_option("--out", ck_out, "Output directory (overrides OUTPUT_DIR)");
    };
    auto* eval_cmd = app.add_subcommand("evaluate", "Loss breakdown and error metrics");
    add_common(eval_cmd);
    auto* snap_cmd = app.add_subcommand("snapshot", "Solution grid at one time");
    add_common(snap_cmd);
    snap_cmd->add_option("--t", t, "Time")->required();
    auto* frames_cmd = app.add_subcommand("frames", "Numbered frames over [0, TOTAL_TIME)");
    add_common(frames_cmd);
    frames_cmd->add_option("--dt", dt, "Time step between frames")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return exit_usage;
    }

    if (*train_cmd) {
        if (!train_out.empty()) train_opts.out = train_out;
        g_stop.store(false);
        auto* previous = std::signal(SIGINT, on_sigint);
        const int code = cmd_train(train_opts, out, err, &g_stop);
        std::signal(SIGINT, previous);
        return code;
    }
    if (!ck_out.empty()) ck.out = ck_out;
    if (*eval_cmd) return cmd_evaluate(ck, out, err);
    if (*snap_cmd) return cmd_snapshot(ck, t, out, err);
    return cmd_frames(ck, dt, out, err);
}

} // namespace stpinn
