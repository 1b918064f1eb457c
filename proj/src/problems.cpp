#include "stpinn/problems.hpp"

#include "stpinn/error.hpp"

#include <cmath>

namespace stpinn {

using std::numbers::pi;

void LossWeights::validate() const {
    for (double w : {residual, initial, boundary})
        if (!std::isfinite(w) || w < 0.0) throw UsageError("loss weights must be finite and >= 0");
    if (residual == 0.0 && initial == 0.0 && boundary == 0.0)
        throw UsageError("loss weights must not all be zero");
}

double heat_exact(double x, double y, double t) {
    return std::exp(-2.0 * pi * pi * t) * std::sin(pi * x) * std::sin(pi * y);
}

double heat_initial(double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }

double wave_initial(double x, double y, double length) {
    const double c = length / 2.0;
    const double r = std::sqrt((x - c) * (x - c) + (y - c) * (y - c));
    return 2.0 * std::exp(-(r * r) * 30.0) + 2.0;
}

double thermal_source(double y, double t) {
    constexpr double d = 0.7;
    const double ramp = std::max((std::cos(t * pi) - d) * 1.0 / (1.0 - d), 0.0);
    const double s = (150.0 - 1200.0 * y) * ramp;
    if (!(t <= 0.3)) return 0.0;
    if (!(y <= 0.125)) return 0.0;
    return s;
}

double thermal_dty(double y, double /*t*/) { return y < 0.5 ? -2.0 : 2.0; }

double tumor_diffusivity(double x, double y) {
    const double dist = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
    if (dist < 0.02) return 0.013;
    if (dist < 0.25) return 0.13;
    return 0.0;
}

double tumor_initial(double x, double y) {
    const double d = std::sqrt((x - 0.6) * (x - 0.6) + (y - 0.6) * (y - 0.6));
    const double r = -d * d - 4.0 * d + 0.4;
    return r > 0.0 ? r : 0.0;
}

ProblemDefaults problem_defaults(std::string_view name) {
    ProblemDefaults d;
    if (name == "heat") {
        d = {1.0, 1.0, 15, 150, {1.0, 1.0, 1.0}, 4, 80, 20000, 0.002};
    } else if (name == "wave") {
        d = {2.0, 0.5, 15, 150, {0.03, 1.0, 0.0005}, 10, 120, 150000, 0.00015};
    } else if (name == "thermal_inversion") {
        d = {1.0, 1.0, 15, 150, {20.0, 1.0, 10.0}, 2, 600, 30000, 0.002};
    } else if (name == "tumor") {
        d = {1.0, 1.0, 20, 150, {1.0, 1.0, 1.0}, 4, 80, 50000, 0.005};
    } else {
        throw ConfigError("unknown problem '" + std::string(name) +
                          "' (expected heat, wave, thermal_inversion or tumor)");
    }
    return d;
}

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names{"heat", "wave", "thermal_inversion", "tumor"};
    return names;
}

ProblemSpec heat_problem(double epsilon) {
    ProblemSpec p;
    p.name = "heat";
    p.residual = make_residual(
        [epsilon](const auto& j, const Point&) { return heat_residual(j, epsilon); });
    p.channels = ChannelSet().with(Axis::t, 1).with(Axis::x, 2).with(Axis::y, 2);
    p.u0 = heat_initial;
    p.boundary = BoundaryKind::dirichlet_zero;
    p.exact = heat_exact;
    p.defaults = problem_defaults("heat");
    return p;
}

ProblemSpec wave_problem(double length, double gravity, Field2 floor) {
    if (!(gravity > 0.0)) throw UsageError("wave: gravity must be > 0");
    ProblemSpec p;
    p.name = "wave";
    p.residual = make_residual([gravity, floor](const auto& j, const Point& pt) {
        const double z = floor ? floor(pt.x, pt.y) : 0.0;
        return wave_residual(j, z, gravity);
    });
    p.channels = ChannelSet().with(Axis::t, 2).with(Axis::x, 2).with(Axis::y, 2);
    p.u0 = [length](double x, double y) { return wave_initial(x, y, length); };
    p.boundary = BoundaryKind::neumann_zero;
    p.defaults = problem_defaults("wave");
    p.defaults.length = length;
    return p;
}

ProblemSpec thermal_problem(double kx, double ky) {
    if (!(kx > 0.0) || !(ky > 0.0)) throw UsageError("thermal_inversion: Kx and Ky must be > 0");
    ProblemSpec p;
    p.name = "thermal_inversion";
    p.residual = make_residual([kx, ky](const auto& j, const Point& pt) {
        return thermal_residual(j, kx, ky, thermal_dty(pt.y, pt.t), thermal_source(pt.y, pt.t));
    });
    p.channels = ChannelSet().with(Axis::t, 1).with(Axis::x, 2).with(Axis::y, 2);
    p.u0 = [](double, double) { return 0.0; };
    p.boundary = BoundaryKind::neumann_zero;
    p.defaults = problem_defaults("thermal_inversion");
    return p;
}

ProblemSpec tumor_problem(double rho) {
    if (!(rho > 0.0)) throw UsageError("tumor: rho must be > 0");
    ProblemSpec p;
    p.name = "tumor";
    p.residual = make_residual([rho](const auto& j, const Point& pt) {
        return tumor_residual(j, tumor_diffusivity(pt.x, pt.y), rho);
    });
    p.channels = ChannelSet().with(Axis::t, 1).with(Axis::x, 2).with(Axis::y, 2);
    p.u0 = tumor_initial;
    p.boundary = BoundaryKind::neumann_zero;
    p.defaults = problem_defaults("tumor");
    return p;
}

ProblemSpec make_problem(std::string_view name, const ProblemCoefficients& c, double length) {
    if (name == "heat") return heat_problem(c.epsilon);
    if (name == "wave") return wave_problem(length, c.gravity);
    if (name == "thermal_inversion") return thermal_problem(c.kx, c.ky);
    if (name == "tumor") return tumor_problem(c.rho);
    problem_defaults(name); // throws the unknown-problem error
    throw ConfigError("unknown problem");
}

double residual_at(const ProblemSpec& problem, const Mlp& net, const Point& p) {
    return problem.residual->eval(eval_jet(net, p), p);
}

} // namespace stpinn
