#include "stpinn/tape.hpp"

#include "stpinn/elementary.hpp"
#include "stpinn/error.hpp"

#include <cmath>
#include <sstream>

namespace stpinn {

namespace detail {

void check_divisor(double numerator, double denominator) {
    if (denominator == 0.0) {
        std::ostringstream msg;
        msg << "division by zero: " << numerator << " / " << denominator;
        throw DomainError(msg.str());
    }
}

void check_sqrt(double arg) {
    if (!(arg > 0.0)) {
        std::ostringstream msg;
        msg << "sqrt outside differentiable domain: sqrt(" << arg << ")";
        throw DomainError(msg.str());
    }
}

void check_pow(double base, double exponent) {
    const bool integral = std::floor(exponent) == exponent;
    if (base < 0.0 && !integral) {
        std::ostringstream msg;
        msg << "pow of negative base with fractional exponent: pow(" << base << ", "
            << exponent << ")";
        throw DomainError(msg.str());
    }
    if (base == 0.0 && exponent < 1.0 && exponent != 0.0) {
        std::ostringstream msg;
        msg << "pow with unbounded derivative at zero base: pow(" << base << ", " << exponent
            << ")";
        throw DomainError(msg.str());
    }
}

} // namespace detail

Var Tape::parameter(double value) {
    const auto id = static_cast<Var::NodeId>(nodes_.size());
    nodes_.push_back(Node{});
    parameters_.push_back(id);
    return Var(value, this, id);
}

Tape* Tape::owner_of(const Var& a, const Var& b) {
    Tape* ta = a.is_constant() ? nullptr : a.tape();
    Tape* tb = b.is_constant() ? nullptr : b.tape();
    if (ta && tb && ta != tb) throw UsageError("operands recorded on different tapes");
    return ta ? ta : tb;
}

Var Tape::record(double value, const Var& a, double da, const Var& b, double db) {
    Tape* owner = owner_of(a, b);
    if (!owner) return Var(value);
    if (owner != this) throw UsageError("operand recorded on a different tape");
    Node n;
    if (!a.is_constant()) {
        n.lhs = a.node();
        n.dlhs = da;
    }
    if (!b.is_constant()) {
        n.rhs = b.node();
        n.drhs = db;
    }
    const auto id = static_cast<Var::NodeId>(nodes_.size());
    nodes_.push_back(n);
    return Var(value, this, id);
}

Var Tape::record(double value, const Var& a, double da) {
    return record(value, a, da, Var(), 0.0);
}

void Tape::clear() {
    nodes_.clear();
    parameters_.clear();
}

std::vector<double> reverse_gradient(const Tape& tape, const Var& root) {
    std::vector<double> grad(tape.num_parameters(), 0.0);
    if (root.is_constant()) return grad;
    if (root.tape() != &tape || root.node() >= tape.size())
        throw UsageError("reverse_gradient: root is not a node of this tape");

    const auto& nodes = tape.nodes();
    std::vector<double> adjoint(root.node() + 1, 0.0);
    adjoint[root.node()] = 1.0;
    for (std::size_t i = root.node() + 1; i-- > 0;) {
        const double a = adjoint[i];
        if (a == 0.0) continue;
        const auto& n = nodes[i];
        if (n.lhs != Var::kConstant) adjoint[n.lhs] += a * n.dlhs;
        if (n.rhs != Var::kConstant) adjoint[n.rhs] += a * n.drhs;
    }
    for (std::size_t p = 0; p < grad.size(); ++p) {
        const auto node = tape.parameter_node(p);
        if (node <= root.node()) grad[p] = adjoint[node];
    }
    return grad;
}

namespace {

Tape* tape_of(const Var& a, const Var& b) {
    if (!a.is_constant()) return a.tape();
    if (!b.is_constant()) return b.tape();
    return nullptr;
}

template <class F>
Var unary(const Var& a, double value, F&& partial) {
    if (a.is_constant()) return Var(value);
    return a.tape()->record(value, a, partial());
}

} // namespace

Var operator-(const Var& a) {
    return unary(a, -a.value(), [] { return -1.0; });
}

Var operator+(const Var& a, const Var& b) {
    Tape* t = tape_of(a, b);
    const double v = a.value() + b.value();
    return t ? t->record(v, a, 1.0, b, 1.0) : Var(v);
}

Var operator-(const Var& a, const Var& b) {
    Tape* t = tape_of(a, b);
    const double v = a.value() - b.value();
    return t ? t->record(v, a, 1.0, b, -1.0) : Var(v);
}

Var operator*(const Var& a, const Var& b) {
    Tape* t = tape_of(a, b);
    const double v = a.value() * b.value();
    return t ? t->record(v, a, b.value(), b, a.value()) : Var(v);
}

Var operator/(const Var& a, const Var& b) {
    detail::check_divisor(a.value(), b.value());
    Tape* t = tape_of(a, b);
    const double v = a.value() / b.value();
    return t ? t->record(v, a, 1.0 / b.value(), b, -v / b.value()) : Var(v);
}

Var tanh(const Var& a) {
    const double v = std::tanh(a.value());
    return unary(a, v, [v] { return 1.0 - v * v; });
}

Var sigmoid(const Var& a) {
    const double v = sigmoid(a.value());
    return unary(a, v, [v] { return v * (1.0 - v); });
}

Var exp(const Var& a) {
    const double v = std::exp(a.value());
    return unary(a, v, [v] { return v; });
}

Var sin(const Var& a) {
    const double x = a.value();
    return unary(a, std::sin(x), [x] { return std::cos(x); });
}

Var cos(const Var& a) {
    const double x = a.value();
    return unary(a, std::cos(x), [x] { return -std::sin(x); });
}

Var sqrt(const Var& a) {
    if (!a.is_constant()) detail::check_sqrt(a.value());
    const double v = std::sqrt(a.value());
    return unary(a, v, [v] { return 0.5 / v; });
}

Var pow(const Var& a, double exponent) {
    const double x = a.value();
    if (!a.is_constant()) detail::check_pow(x, exponent);
    return unary(a, std::pow(x, exponent), [x, exponent] {
        return exponent == 0.0 ? 0.0 : exponent * std::pow(x, exponent - 1.0);
    });
}

Var clamp_min(const Var& a, double floor) {
    const double x = a.value();
    if (x > floor) return a;
    return Var(floor);
}

Var select(bool predicate, const Var& if_true, const Var& if_false) {
    return predicate ? if_true : if_false;
}

} // namespace stpinn
