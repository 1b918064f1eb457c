#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stpinn/error.hpp"
#include "stpinn/problems.hpp"
#include "support/reference.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stpinn;
using std::numbers::pi;
using stpinn::testing::heat_exact_jet;

namespace {

Jet<double> constant_jet(double c) {
    Jet<double> j;
    j.u = c;
    return j;
}

} // namespace

TEST_CASE("heat_exact values") {
    CHECK(heat_exact(0.5, 0.5, 0.0) == 1.0);
    CHECK(heat_exact(0.0, 0.3, 0.7) == 0.0);
    CHECK(heat_exact(0.5, 0.5, 0.1) == doctest::Approx(std::exp(-0.2 * pi * pi)).epsilon(1e-15));
    CHECK(heat_exact(0.5, 0.5, 0.1) == doctest::Approx(0.13887).epsilon(1e-4));
    CHECK(heat_initial(0.25, 0.5) == heat_exact(0.25, 0.5, 0.0));
}

TEST_CASE("manufactured solution zeroes the heat residual") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ProblemSpec heat = heat_problem();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Point p{u(rng), u(rng), u(rng)};
        const Jet<double> j = heat_exact_jet(p.x, p.y, p.t);
        worst = std::max(worst, std::abs(heat_residual(j)));
        worst = std::max(worst, std::abs(heat.residual->eval(j, p)));
        // consistency of the hand-written jet with the closed form
        CHECK(j.u == doctest::Approx(heat_exact(p.x, p.y, p.t)).epsilon(1e-14));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("residual probes") {
    // heat: u = t -> 1
    Jet<double> t_probe;
    t_probe.ut = 1.0;
    CHECK(heat_residual(t_probe) == 1.0);
    CHECK(heat_residual(constant_jet(3.0)) == 0.0);

    // wave: u = t^2, z = 0 -> u_tt = 2
    Jet<double> t2;
    t2.u = 0.25;
    t2.ut = 1.0;
    t2.utt = 2.0;
    CHECK(wave_residual(t2, 0.0, 9.81) == 2.0);
    CHECK(wave_residual(constant_jet(1.7), 0.0, 9.81) == 0.0);
    // u = x with depth: -g (1 + 0) = -g
    Jet<double> xp;
    xp.u = 0.4;
    xp.ux = 1.0;
    CHECK(wave_residual(xp, 0.0, 9.81) == -9.81);

    // thermal: constant field where the source vanishes
    CHECK(thermal_residual(constant_jet(0.8), 0.1, 0.01, thermal_dty(0.7, 0.5), thermal_source(0.7, 0.5)) == 0.0);
    Jet<double> yp;
    yp.uy = 1.0;
    CHECK(thermal_residual(yp, 0.1, 0.01, -2.0, 0.0) == 2.0);

    // tumor: logistic term at 0, 1 and 0.5
    CHECK(tumor_residual(constant_jet(0.0), 0.13, 0.025) == 0.0);
    CHECK(tumor_residual(constant_jet(1.0), 0.13, 0.025) == 0.0);
    CHECK(tumor_residual(constant_jet(0.5), 0.13, 0.025) == doctest::Approx(-0.00625).epsilon(1e-15));
    const double r = tumor_residual(constant_jet(0.5), 0.13, 0.025);
    CHECK(r * r == doctest::Approx(3.90625e-05).epsilon(1e-14));
}

TEST_CASE("thermal source and gradient fields") {
    CHECK(thermal_source(0.0, 0.0) == 150.0);
    CHECK(thermal_source(0.2, 0.0) == 0.0);
    CHECK(thermal_source(0.1, 0.0) == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(thermal_source(0.0, 0.31) == 0.0);
    const double c = (std::cos(pi * 0.1) - 0.7) / 0.3;
    CHECK(thermal_source(0.05, 0.1) == doctest::Approx(c * (150.0 - 60.0)).epsilon(1e-14));
    // clamp: cos(pi t) < 0.7 inside the time guard
    CHECK(thermal_source(0.0, 0.3) == doctest::Approx(std::max(0.0, (std::cos(0.3 * pi) - 0.7) / 0.3) * 150).epsilon(1e-12));
    CHECK(thermal_source(0.0, 0.3) == 0.0);

    CHECK(thermal_dty(0.2, 0.0) == -2.0);
    CHECK(thermal_dty(0.5, 0.0) == 2.0);
    CHECK(thermal_dty(0.9, 0.0) == 2.0);
    CHECK(thermal_dty(std::nextafter(0.5, 0.0), 0.0) == -2.0);
}

TEST_CASE("tumor diffusivity discs and initial bump") {
    CHECK(tumor_diffusivity(0.5, 0.5) == 0.013);
    CHECK(tumor_diffusivity(0.8, 0.5) == 0.13);
    CHECK(tumor_diffusivity(0.9, 0.9) == 0.0);
    // inner disc overrides outer: squared distance 0.0196 < 0.02
    CHECK(tumor_diffusivity(0.5 + 0.14, 0.5) == 0.013);
    CHECK(tumor_diffusivity(0.5 + 0.15, 0.5) == 0.13);

    CHECK(tumor_initial(0.6, 0.6) == doctest::Approx(0.4).epsilon(1e-15));
    const double d = 0.05;
    CHECK(tumor_initial(0.6 + d, 0.6) == doctest::Approx(-d * d - 4 * d + 0.4).epsilon(1e-14));
    CHECK(tumor_initial(0.0, 0.0) == 0.0);
}

TEST_CASE("wave initial bump") {
    CHECK(wave_initial(1.0, 1.0, 2.0) == 4.0);
    CHECK(wave_initial(0.5, 0.5, 1.0) == 4.0);
    CHECK(wave_initial(1.2, 1.0, 2.0) == doctest::Approx(2.0 * std::exp(-30.0 * 0.04) + 2.0).epsilon(1e-14));
    CHECK(wave_initial(0.0, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-20));
}

TEST_CASE("problem library defaults") {
    const ProblemDefaults h = problem_defaults("heat");
    CHECK(h.length == 1.0);
    CHECK(h.total_time == 1.0);
    CHECK(h.n_points == 15);
    CHECK(h.n_points_plot == 150);
    CHECK(h.weights == LossWeights{1.0, 1.0, 1.0});
    CHECK(h.layers == 4);
    CHECK(h.neurons == 80);
    CHECK(h.epochs == 20000);
    CHECK(h.learning_rate == 0.002);

    const ProblemDefaults w = problem_defaults("wave");
    CHECK(w.length == 2.0);
    CHECK(w.total_time == 0.5);
    CHECK(w.weights == LossWeights{0.03, 1.0, 0.0005});
    CHECK(w.layers == 10);
    CHECK(w.neurons == 120);
    CHECK(w.epochs == 150000);
    CHECK(w.learning_rate == 0.00015);

    const ProblemDefaults t = problem_defaults("thermal_inversion");
    CHECK(t.weights == LossWeights{20.0, 1.0, 10.0});
    CHECK(t.layers == 2);
    CHECK(t.neurons == 600);
    CHECK(t.epochs == 30000);
    CHECK(t.learning_rate == 0.002);

    const ProblemDefaults m = problem_defaults("tumor");
    CHECK(m.n_points == 20);
    CHECK(m.weights == LossWeights{1.0, 1.0, 1.0});
    CHECK(m.layers == 4);
    CHECK(m.neurons == 80);
    CHECK(m.epochs == 50000);
    CHECK(m.learning_rate == 0.005);

    CHECK_THROWS_AS(problem_defaults("foo"), ConfigError);
    CHECK(problem_names() == std::vector<std::string>{"heat", "wave", "thermal_inversion", "tumor"});
}

TEST_CASE("make_problem wires boundary kinds, channels and coefficients") {
    const ProblemCoefficients k;
    const ProblemSpec heat = make_problem("heat", k, 1.0);
    CHECK(heat.boundary == BoundaryKind::dirichlet_zero);
    CHECK(heat.has_exact());
    CHECK(heat.u0(0.5, 0.5) == 1.0);
    CHECK(heat.channels == ChannelSet().with(Axis::t, 1).with(Axis::x, 2).with(Axis::y, 2));

    const ProblemSpec wave = make_problem("wave", k, 2.0);
    CHECK(wave.boundary == BoundaryKind::neumann_zero);
    CHECK_FALSE(wave.has_exact());
    CHECK(wave.u0(1.0, 1.0) == 4.0);
    CHECK(wave.channels.second(Axis::t));

    const ProblemSpec thermal = make_problem("thermal_inversion", k, 1.0);
    CHECK(thermal.u0(0.3, 0.2) == 0.0);
    CHECK(thermal.boundary == BoundaryKind::neumann_zero);

    const ProblemSpec tumor = make_problem("tumor", k, 1.0);
    CHECK(tumor.u0(0.6, 0.6) == doctest::Approx(0.4));

    // Coefficients reach the residual.
    ProblemCoefficients scaled;
    scaled.epsilon = 2.0;
    Jet<double> j;
    j.uxx = 1.0;
    const Point p{0.1, 0.2, 0.3};
    CHECK(make_problem("heat", scaled, 1.0).residual->eval(j, p) == -2.0);
    scaled.rho = 0.5;
    CHECK(make_problem("tumor", scaled, 1.0).residual->eval(constant_jet(0.5), p) == -0.125);
    // thermal residual reads the fields at the point
    CHECK(thermal.residual->eval(constant_jet(1.0), Point{0.3, 0.0, 0.0}) == -150.0);
    // tumor D enters through the point as well
    Jet<double> lap;
    lap.uxx = 1.0;
    lap.uyy = 1.0;
    CHECK(tumor.residual->eval(lap, Point{0.5, 0.5, 0.0}) == doctest::Approx(-0.026).epsilon(1e-15));

    CHECK_THROWS_AS(make_problem("foo", k, 1.0), ConfigError);
}

TEST_CASE("wave residual with a floor profile") {
    const ProblemSpec pool = wave_problem(2.0, 9.81, [](double x, double) { return 0.1 * x; });
    Jet<double> j;
    j.u = 1.0;
    j.uxx = 1.0;
    // depth = u - z = 1 - 0.05
    CHECK(pool.residual->eval(j, Point{0.5, 0.0, 0.0}) == doctest::Approx(-9.81 * 0.95).epsilon(1e-15));
}

TEST_CASE("residual_at agrees with the jet route") {
    const Mlp net = stpinn::testing::random_net(2, 6, Activation::tanh, 1);
    const ProblemSpec tumor = tumor_problem();
    const Point p{0.4, 0.55, 0.3};
    const Jet<double> j = eval_jet(net, p);
    CHECK(residual_at(tumor, net, p) ==
          doctest::Approx(tumor_residual(j, tumor_diffusivity(p.x, p.y), 0.025)).epsilon(1e-14));
}

TEST_CASE("coefficient validation") {
    CHECK_THROWS_AS(wave_problem(2.0, 0.0), UsageError);
    CHECK_THROWS_AS(thermal_problem(0.0, 0.01), UsageError);
    CHECK_THROWS_AS(tumor_problem(-1.0), UsageError);
}
