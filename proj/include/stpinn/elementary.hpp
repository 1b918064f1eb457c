#pragma once

#include <cmath>

namespace stpinn {

// Plain-double counterparts of the differentiable elementaries, so generic
// code can call sigmoid/clamp_min/select uniformly through ADL or overloads.

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }
inline double clamp_min(double a, double floor) { return a > floor ? a : floor; }
inline double select(bool predicate, double if_true, double if_false) {
    return predicate ? if_true : if_false;
}

namespace detail {

// Domain checks shared by Var and Dual2. Each throws DomainError naming the
// operand values. Derivatives are required, so the checks are stricter than
// the plain functions: sqrt(0) and pow(0, e<1) are rejected because their
// first derivative is unbounded.
void check_divisor(double numerator, double denominator);
void check_sqrt(double arg);
void check_pow(double base, double exponent);

} // namespace detail
} // namespace stpinn
