#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace stpinn {

class Tape;

/// Scalar recorded on a reverse-mode Tape. Constants carry no node and
/// no tape; they never receive an adjoint.
class Var {
public:
    using NodeId = std::uint32_t;
    static constexpr NodeId kConstant = std::numeric_limits<NodeId>::max();

    Var() = default;
    Var(double constant) : value_(constant) {} // NOLINT(implicit)

    double value() const { return value_; }
    Tape* tape() const { return tape_; }
    NodeId node() const { return node_; }
    bool is_constant() const { return node_ == kConstant; }

private:
    friend class Tape;
    Var(double v, Tape* tape, NodeId node) : value_(v), tape_(tape), node_(node) {}

    double value_ = 0.0;
    Tape* tape_ = nullptr;
    NodeId node_ = kConstant;
};

/// Linear record of elementary operations, each with at most two operands
/// and their local partial derivatives. Nodes are appended in evaluation
/// order, so the record is topologically sorted by construction.
///
/// Parameters are leaf nodes registered through parameter(); their ids are
/// dense, starting at 0 in registration order.
class Tape {
public:
    struct Node {
        Var::NodeId lhs = Var::kConstant;
        Var::NodeId rhs = Var::kConstant;
        double dlhs = 0.0;
        double drhs = 0.0;
    };

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var parameter(double value);

    /// Records `value = op(a, b)` with local partials da, db.
    /// Constant operands are dropped; if both are constant the result is a
    /// constant and nothing is recorded.
    Var record(double value, const Var& a, double da, const Var& b, double db);
    Var record(double value, const Var& a, double da);

    std::size_t size() const { return nodes_.size(); }
    std::size_t num_parameters() const { return parameters_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    Var::NodeId parameter_node(std::size_t id) const { return parameters_.at(id); }

    void reserve(std::size_t nodes) { nodes_.reserve(nodes); }
    void clear();

private:
    Tape* owner_of(const Var& a, const Var& b);

    std::vector<Node> nodes_;
    std::vector<Var::NodeId> parameters_;
};

/// d(root)/d(parameter) for every registered parameter, indexed by parameter
/// id. A constant root yields all zeros; a root recorded on another tape (or
/// past the end of this one) is a UsageError.
std::vector<double> reverse_gradient(const Tape& tape, const Var& root);

Var operator-(const Var& a);
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var exp(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var sqrt(const Var& a);
Var pow(const Var& a, double exponent);
/// max(a, floor); derivative is zero unless a > floor strictly.
Var clamp_min(const Var& a, double floor);
Var select(bool predicate, const Var& if_true, const Var& if_false);

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

} // namespace stpinn
