#include "stpinn/losses.hpp"

#include "stpinn/error.hpp"

#include <cmath>
#include <sstream>

namespace stpinn {

namespace {

// Channels in the row order JetBatch uses: value, then for x, y, t the first
// and (if present) second derivative. Returns pointers into the jet so the
// tape leaves can be wired to whichever channels the batch produced.
template <class S>
std::vector<S*> channel_slots(Jet<S>& j, ChannelSet ch) {
    std::vector<S*> slots{&j.u};
    const std::array<std::pair<S*, S*>, 3> axes{
        std::pair{&j.ux, &j.uxx}, std::pair{&j.uy, &j.uyy}, std::pair{&j.ut, &j.utt}};
    for (int a = 0; a < 3; ++a) {
        if (ch.first(Axis(a))) slots.push_back(axes[a].first);
        if (ch.second(Axis(a))) slots.push_back(axes[a].second);
    }
    return slots;
}

[[noreturn]] void diverged(const char* what, double value, const Point& p) {
    std::ostringstream msg;
    msg << what << " is " << value << " at (x=" << p.x << ", y=" << p.y << ", t=" << p.t << ")";
    throw DivergenceError(msg.str());
}

struct TermOptions {
    bool check_finite = false;
    const char* name = "loss term";
};

// mean over pts of term(jet, p)^2, evaluated on `batch`.
template <class Term>
LossValue mean_square(const Mlp& net, std::span<const Point> pts, ChannelSet channels, Term&& term,
                      Gradient mode, JetBatch& batch, TermOptions opts = {}) {
    if (pts.empty()) throw UsageError(std::string(opts.name) + ": empty point set");
    batch.forward(net, pts, channels);
    const auto n = static_cast<Eigen::Index>(pts.size());
    const int c_count = batch.channel_count();
    const Eigen::MatrixXd& out = batch.output();

    LossValue result;
    if (mode == Gradient::skip) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Point& p = pts[static_cast<std::size_t>(i)];
            const double r = term(batch.jet_at(i), p);
            if (opts.check_finite && !std::isfinite(r)) diverged(opts.name, r, p);
            acc = acc + r * r;
        }
        result.value = acc / double(n);
        return result;
    }

    Tape tape;
    tape.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(c_count + 16));
    Var acc(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point& p = pts[static_cast<std::size_t>(i)];
        Jet<Var> j;
        const auto slots = channel_slots(j, channels);
        for (int c = 0; c < c_count; ++c) *slots[static_cast<std::size_t>(c)] = tape.parameter(out(c, i));
        const Var r = term(j, p);
        if (opts.check_finite && !std::isfinite(r.value())) diverged(opts.name, r.value(), p);
        acc = acc + r * r;
    }
    const Var loss = acc / Var(double(n));
    result.value = loss.value();

    const std::vector<double> leaf = reverse_gradient(tape, loss);
    const Eigen::Map<const Eigen::MatrixXd> adjoint(leaf.data(), c_count, n);
    result.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_parameters()));
    batch.backward(adjoint, result.gradient);
    return result;
}

void add_into(LossValue& acc, const LossValue& term) {
    acc.value = acc.value + term.value;
    if (term.gradient.size() == 0) return;
    if (acc.gradient.size() == 0)
        acc.gradient = term.gradient;
    else
        acc.gradient += term.gradient;
}

} // namespace

LossValue residual_loss(const Mlp& net, const ProblemSpec& problem, std::span<const Point> pts,
                        Gradient mode, LossWorkspace* ws) {
    LossWorkspace local;
    JetBatch& batch = ws ? ws->interior : local.interior;
    const Residual& res = *problem.residual;
    return mean_square(
        net, pts, problem.channels, [&res](const auto& j, const Point& p) { return res.eval(j, p); },
        mode, batch, {true, "residual"});
}

LossValue initial_loss(const Mlp& net, const ProblemSpec& problem, std::span<const Point> pts,
                       Gradient mode, LossWorkspace* ws) {
    LossWorkspace local;
    JetBatch& batch = ws ? ws->initial : local.initial;
    const Field2& u0 = problem.u0;
    return mean_square(
        net, pts, ChannelSet(), [&u0](const auto& j, const Point& p) { return j.u - u0(p.x, p.y); },
        mode, batch, {false, "initial loss"});
}

LossValue face_loss(const Mlp& net, BoundaryKind kind, int face, std::span<const Point> pts,
                    Gradient mode, LossWorkspace* ws) {
    if (face < 0 || face > 3) throw UsageError("face index must be 0..3");
    LossWorkspace local;
    JetBatch& batch = ws ? ws->faces[static_cast<std::size_t>(face)]
                         : local.faces[static_cast<std::size_t>(face)];
    const TermOptions opts{false, "boundary loss"};
    if (kind == BoundaryKind::dirichlet_zero) {
        return mean_square(
            net, pts, ChannelSet(), [](const auto& j, const Point&) { return j.u; }, mode, batch,
            opts);
    }
    // down/up faces have a y normal, left/right an x normal
    if (face < 2) {
        return mean_square(
            net, pts, ChannelSet().with(Axis::y, 1),
            [](const auto& j, const Point&) { return j.uy; }, mode, batch, opts);
    }
    return mean_square(
        net, pts, ChannelSet().with(Axis::x, 1), [](const auto& j, const Point&) { return j.ux; },
        mode, batch, opts);
}

namespace {

LossValue four_faces(const Mlp& net, BoundaryKind kind, const BoundaryFaces& f, Gradient mode,
                     LossWorkspace* ws) {
    LossValue sum = face_loss(net, kind, 0, f.down, mode, ws);
    add_into(sum, face_loss(net, kind, 1, f.up, mode, ws));
    add_into(sum, face_loss(net, kind, 2, f.left, mode, ws));
    add_into(sum, face_loss(net, kind, 3, f.right, mode, ws));
    return sum;
}

} // namespace

LossValue boundary_loss_neumann(const Mlp& net, const BoundaryFaces& faces, Gradient mode,
                                LossWorkspace* ws) {
    return four_faces(net, BoundaryKind::neumann_zero, faces, mode, ws);
}

LossValue boundary_loss_dirichlet(const Mlp& net, const BoundaryFaces& faces, Gradient mode,
                                  LossWorkspace* ws) {
    return four_faces(net, BoundaryKind::dirichlet_zero, faces, mode, ws);
}

LossValue boundary_loss(const Mlp& net, const ProblemSpec& problem, const BoundaryFaces& faces,
                        Gradient mode, LossWorkspace* ws) {
    return four_faces(net, problem.boundary, faces, mode, ws);
}

TotalLoss total_loss(const Mlp& net, const ProblemSpec& problem, const LossWeights& weights,
                     const CollocationSet& sets, Gradient mode, LossWorkspace* ws) {
    weights.validate();
    LossWorkspace local;
    LossWorkspace* w = ws ? ws : &local;
    const LossValue r = residual_loss(net, problem, sets.interior, mode, w);
    const LossValue i = initial_loss(net, problem, sets.initial, mode, w);
    const LossValue b = boundary_loss(net, problem, sets.boundary, mode, w);

    TotalLoss out;
    out.breakdown.residual = r.value;
    out.breakdown.initial = i.value;
    out.breakdown.boundary = b.value;
    out.breakdown.total =
        weights.residual * r.value + weights.initial * i.value + weights.boundary * b.value;
    if (mode == Gradient::compute) {
        out.gradient = weights.residual * r.gradient;
        out.gradient += weights.initial * i.gradient;
        out.gradient += weights.boundary * b.gradient;
    }
    return out;
}

} // namespace stpinn
