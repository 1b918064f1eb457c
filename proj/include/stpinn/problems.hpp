#pragma once

#include "stpinn/jet.hpp"
#include "stpinn/loss_weights.hpp"
#include "stpinn/network.hpp"
#include "stpinn/tape.hpp"

#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace stpinn {

/// PDE operator applied to a network jet at one point. Implementations are
/// written once as a generic callable and evaluated on plain doubles or on
/// tape scalars.
class Residual {
public:
    virtual ~Residual() = default;
    virtual double eval(const Jet<double>& j, const Point& p) const = 0;
    virtual Var eval(const Jet<Var>& j, const Point& p) const = 0;
};

template <class F>
class ResidualFn final : public Residual {
public:
    explicit ResidualFn(F f) : f_(std::move(f)) {}
    double eval(const Jet<double>& j, const Point& p) const override { return f_(j, p); }
    Var eval(const Jet<Var>& j, const Point& p) const override { return f_(j, p); }

private:
    F f_;
};

template <class F>
std::shared_ptr<const Residual> make_residual(F f) {
    return std::make_shared<ResidualFn<F>>(std::move(f));
}

enum class BoundaryKind { neumann_zero, dirichlet_zero };

/// Per-problem parameter listing (domain, sampling, weights, network, training).
struct ProblemDefaults {
    double length = 1.0;
    double total_time = 1.0;
    int n_points = 15;
    int n_points_plot = 150;
    LossWeights weights{};
    int layers = 4;
    int neurons = 80;
    int epochs = 20000;
    double learning_rate = 0.002;
};

/// Coefficients the problem library exposes for overriding.
struct ProblemCoefficients {
    double epsilon = 1.0;   // heat diffusivity
    double gravity = 9.81;  // wave
    double kx = 0.1;        // thermal inversion horizontal diffusion
    double ky = 0.01;       // thermal inversion vertical diffusion
    double rho = 0.025;     // tumor proliferation rate

    bool operator==(const ProblemCoefficients&) const = default;
};

using Field2 = std::function<double(double, double)>;
using Field3 = std::function<double(double, double, double)>;

struct ProblemSpec {
    std::string name;
    std::shared_ptr<const Residual> residual;
    ChannelSet channels; // jet channels the residual reads
    Field2 u0;
    BoundaryKind boundary = BoundaryKind::neumann_zero;
    Field3 exact; // empty unless a closed-form solution is known
    ProblemDefaults defaults;

    bool has_exact() const { return static_cast<bool>(exact); }
};

// Residual operators, generic over the scalar type.

template <class S>
S heat_residual(const Jet<S>& j, double epsilon = 1.0) {
    return j.ut - epsilon * j.uxx - epsilon * j.uyy;
}

/// u_tt - g (u_x^2 + (u - z) u_xx + u_y^2 + (u - z) u_yy), z = floor height.
template <class S>
S wave_residual(const Jet<S>& j, double floor_z, double gravity) {
    const S depth = j.u - floor_z;
    return j.utt - gravity * (j.ux * j.ux + depth * j.uxx + j.uy * j.uy + depth * j.uyy);
}

/// Advection-diffusion with vertical advection dTy and a ground source.
/// The advection term enters with a minus sign.
template <class S>
S thermal_residual(const Jet<S>& j, double kx, double ky, double dty, double source) {
    return j.ut - dty * j.uy - kx * j.uxx - ky * j.uyy - source;
}

template <class S>
S tumor_residual(const Jet<S>& j, double diffusivity, double rho) {
    return j.ut - diffusivity * j.uxx - diffusivity * j.uyy - rho * j.u * (1.0 - j.u);
}

// Coefficient fields and initial states.

/// exp(-2 pi^2 t) sin(pi x) sin(pi y)
double heat_exact(double x, double y, double t);
double heat_initial(double x, double y);

/// 2 exp(-30 r^2) + 2, r = distance to the centre of [0, length]^2.
double wave_initial(double x, double y, double length);

/// Evaporation near the ground during the early part of the run.
double thermal_source(double y, double t);
/// Temperature gradient: -2 below y = 0.5, +2 from y = 0.5 up.
double thermal_dty(double y, double t);

/// Tissue diffusivity on nested discs around (0.5, 0.5): 0.013 for squared
/// distance < 0.02, 0.13 for < 0.25, 0 outside.
double tumor_diffusivity(double x, double y);
/// max(0, -d^2 - 4d + 0.4), d = distance to (0.6, 0.6).
double tumor_initial(double x, double y);

// Problem library.

ProblemSpec heat_problem(double epsilon = 1.0);
/// `floor` defaults to z = 0.
ProblemSpec wave_problem(double length = 2.0, double gravity = 9.81, Field2 floor = {});
ProblemSpec thermal_problem(double kx = 0.1, double ky = 0.01);
ProblemSpec tumor_problem(double rho = 0.025);

/// heat | wave | thermal_inversion | tumor. `length` is the domain edge the
/// wave initial bump is centred on.
ProblemSpec make_problem(std::string_view name, const ProblemCoefficients& coeffs, double length);
ProblemDefaults problem_defaults(std::string_view name);
const std::vector<std::string>& problem_names();

/// Residual of `problem` for the network at one point.
double residual_at(const ProblemSpec& problem, const Mlp& net, const Point& p);

} // namespace stpinn
