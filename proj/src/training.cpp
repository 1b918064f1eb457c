#include "stpinn/training.hpp"

#include "stpinn/error.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <random>

namespace stpinn {

AdamState AdamState::fresh(Eigen::Index n, double lr) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(n);
    s.v = Eigen::VectorXd::Zero(n);
    s.lr = lr;
    return s;
}

void adam_step(AdamState& s, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads, std::uint64_t epoch) {
    if (params.size() != grads.size() || s.m.size() != grads.size() || s.v.size() != grads.size())
        throw UsageError("adam_step: parameter, gradient and state sizes differ");
    for (Eigen::Index i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i]))
            throw DivergenceError(fmt::format("non-finite gradient {} at epoch {}, parameter {}",
                                              grads[i], epoch, i));
    }
    ++s.step;
    const double c1 = 1.0 - std::pow(s.beta1, double(s.step));
    const double c2 = 1.0 - std::pow(s.beta2, double(s.step));
    s.m = s.beta1 * s.m + (1.0 - s.beta1) * grads;
    s.v = s.beta2 * s.v + (1.0 - s.beta2) * grads.cwiseProduct(grads);
    params.array() -= s.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.eps);
}

std::string_view to_string(TrainMode m) {
    return m == TrainMode::full_batch ? "full_batch" : "sgd_sketch";
}

TrainMode parse_train_mode(std::string_view name) {
    if (name == "full_batch") return TrainMode::full_batch;
    if (name == "sgd_sketch") return TrainMode::sgd_sketch;
    throw UsageError("unknown training mode '" + std::string(name) +
                     "' (expected full_batch or sgd_sketch)");
}

std::string_view to_string(TrainStatus s) {
    switch (s) {
    case TrainStatus::completed: return "completed";
    case TrainStatus::interrupted: return "interrupted";
    case TrainStatus::reached_threshold: return "reached_threshold";
    case TrainStatus::diverged: return "diverged";
    }
    return "unknown";
}

std::string format_progress(const Progress& p) {
    return fmt::format(
        "Epoch: {} - Loss: {:.6f}, Residual Loss: {:.6f}, Initial Loss: {:.6f}, Boundary Loss: {:.6f}",
        p.epoch, p.loss.total, p.loss.residual, p.loss.initial, p.loss.boundary);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void record(TrainReport& r, const LossBreakdown& b) {
    r.total.push_back(b.total);
    r.residual.push_back(b.residual);
    r.initial.push_back(b.initial);
    r.boundary.push_back(b.boundary);
}

Point random_point(std::mt19937_64& rng, const DomainBox& box) {
    auto u = [&rng](const std::array<double, 2>& r) {
        return std::uniform_real_distribution<double>(r[0], r[1])(rng);
    };
    const double x = u(box.x);
    const double y = u(box.y);
    const double t = u(box.t);
    return {x, y, t};
}

// One epoch of the point-at-a-time scheme: residual, boundary and initial
// losses at one random point each, each followed by a plain gradient step.
LossBreakdown sketch_epoch(Mlp& net, Eigen::VectorXd& params, const ProblemSpec& problem,
                           const TrainConfig& cfg, std::uint64_t epoch, LossWorkspace& ws) {
    std::mt19937_64 rng(epoch_seed(cfg.seed, epoch));
    const DomainBox& box = cfg.box;
    auto step = [&](const LossValue& l) {
        for (Eigen::Index i = 0; i < l.gradient.size(); ++i)
            if (!std::isfinite(l.gradient[i]))
                throw DivergenceError(fmt::format("non-finite gradient at epoch {}, parameter {}",
                                                  epoch + 1, i));
        params -= cfg.learning_rate * l.gradient;
        net.assign({params.data(), static_cast<std::size_t>(params.size())});
    };

    LossBreakdown b;
    const Point interior = random_point(rng, box);
    const LossValue r = residual_loss(net, problem, std::span(&interior, 1), Gradient::compute, &ws);
    b.residual = r.value;
    step(r);

    const int face = std::uniform_int_distribution<int>(0, 3)(rng);
    Point on_face = random_point(rng, box);
    switch (face) {
    case 0: on_face.y = box.y[0]; break;
    case 1: on_face.y = box.y[1]; break;
    case 2: on_face.x = box.x[0]; break;
    default: on_face.x = box.x[1]; break;
    }
    const LossValue bl =
        face_loss(net, problem.boundary, face, std::span(&on_face, 1), Gradient::compute, &ws);
    b.boundary = bl.value;
    step(bl);

    Point start = random_point(rng, box);
    start.t = box.t[0];
    const LossValue il = initial_loss(net, problem, std::span(&start, 1), Gradient::compute, &ws);
    b.initial = il.value;
    step(il);

    b.total = cfg.weights.residual * b.residual + cfg.weights.initial * b.initial +
              cfg.weights.boundary * b.boundary;
    return b;
}

} // namespace

TrainResult train(Mlp net, const ProblemSpec& problem, const TrainConfig& cfg,
                  const TrainHooks& hooks) {
    cfg.box.validate();
    cfg.weights.validate();
    if (cfg.epochs < 0) throw UsageError("epochs must be >= 0");
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
        throw UsageError("learning rate must be finite and >= 0");
    if (cfg.report_every < 1) throw UsageError("report_every must be >= 1");

    TrainReport report;
    report.total.reserve(static_cast<std::size_t>(cfg.epochs));
    report.residual.reserve(static_cast<std::size_t>(cfg.epochs));
    report.initial.reserve(static_cast<std::size_t>(cfg.epochs));
    report.boundary.reserve(static_cast<std::size_t>(cfg.epochs));

    Eigen::VectorXd params = net.flatten();
    AdamState adam = AdamState::fresh(params.size(), cfg.learning_rate);
    LossWorkspace ws;

    CollocationSet sets;
    const bool resample = cfg.sampling == SamplingMode::uniform_random;
    if (cfg.mode == TrainMode::full_batch && !resample)
        sets = collocation(cfg.box, cfg.n_points, cfg.sampling, cfg.seed);

    const auto start = Clock::now();
    auto block_start = start;
    for (int e = 0; e < cfg.epochs; ++e) {
        if (hooks.should_stop && hooks.should_stop()) {
            report.status = TrainStatus::interrupted;
            break;
        }
        const auto epoch = static_cast<std::uint64_t>(e);
        try {
            LossBreakdown b;
            if (cfg.mode == TrainMode::sgd_sketch) {
                b = sketch_epoch(net, params, problem, cfg, epoch, ws);
            } else {
                if (resample)
                    sets = collocation(cfg.box, cfg.n_points, cfg.sampling, epoch_seed(cfg.seed, epoch));
                const TotalLoss tl =
                    total_loss(net, problem, cfg.weights, sets, Gradient::compute, &ws);
                b = tl.breakdown;
                if (!std::isfinite(b.total))
                    throw DivergenceError(fmt::format("non-finite loss at epoch {}", e + 1));
                record(report, b);
                if (cfg.stop_loss && b.total <= *cfg.stop_loss) {
                    report.status = TrainStatus::reached_threshold;
                    break;
                }
                adam_step(adam, params, tl.gradient, epoch + 1);
                net.assign({params.data(), static_cast<std::size_t>(params.size())});
            }
            if (cfg.mode == TrainMode::sgd_sketch) {
                if (!std::isfinite(b.total))
                    throw DivergenceError(fmt::format("non-finite loss at epoch {}", e + 1));
                record(report, b);
            }
            if (!net.all_finite())
                throw DivergenceError(fmt::format("non-finite parameter after epoch {}", e + 1));
            if (cfg.mode == TrainMode::sgd_sketch && cfg.stop_loss && b.total <= *cfg.stop_loss) {
                report.status = TrainStatus::reached_threshold;
                break;
            }
            if ((e + 1) % cfg.report_every == 0) {
                const double secs = seconds_since(block_start);
                block_start = Clock::now();
                report.block_seconds.push_back(secs);
                if (hooks.on_progress) hooks.on_progress({epoch + 1, b, secs});
            }
        } catch (const DivergenceError& err) {
            report.status = TrainStatus::diverged;
            report.message = err.what();
            break;
        }
    }
    report.wall_seconds = seconds_since(start);
    return {std::move(net), std::move(report)};
}

} // namespace stpinn
