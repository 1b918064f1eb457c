#pragma once

#include "stpinn/elementary.hpp"
#include "stpinn/tape.hpp"

#include <cmath>
#include <concepts>

namespace stpinn {

/// Second-order forward-mode scalar: a value together with its first and
/// second derivative with respect to one designated input.
///
/// T is either double (plain input derivatives) or Var, in which case every
/// component is itself recorded on a Tape and parameter gradients of any
/// expression in value/d1/d2 come out of one reverse sweep.
template <class T>
struct Dual2 {
    T value{};
    T d1{};
    T d2{};
};

template <class T>
Dual2<T> lift_input(const T& x, bool designated) {
    return {x, T(designated ? 1.0 : 0.0), T(0.0)};
}

template <class T>
Dual2<T> constant(const T& x) {
    return {x, T(0.0), T(0.0)};
}

template <class T>
Dual2<T> operator-(const Dual2<T>& a) {
    return {-a.value, -a.d1, -a.d2};
}

template <class T>
Dual2<T> operator+(const Dual2<T>& a, const Dual2<T>& b) {
    return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

template <class T>
Dual2<T> operator-(const Dual2<T>& a, const Dual2<T>& b) {
    return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}

// (fg)'' = f''g + 2f'g' + fg''
template <class T>
Dual2<T> operator*(const Dual2<T>& a, const Dual2<T>& b) {
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + T(2.0) * a.d1 * b.d1 + a.value * b.d2};
}

template <class T>
Dual2<T> operator/(const Dual2<T>& a, const Dual2<T>& b) {
    detail::check_divisor(value_of(a.value), value_of(b.value));
    // a/b = a * (1/b), with (1/b)' = -b'/b^2 and (1/b)'' = 2b'^2/b^3 - b''/b^2
    const T inv = T(1.0) / b.value;
    const T inv2 = inv * inv;
    const Dual2<T> recip{inv, -b.d1 * inv2, T(2.0) * b.d1 * b.d1 * inv2 * inv - b.d2 * inv2};
    return a * recip;
}

// Mixed operations with the underlying scalar. For T = double these are the
// only scalar overloads; for T = Var a separate set also accepts raw doubles.
template <class T>
Dual2<T> operator+(const Dual2<T>& a, const T& s) {
    return {a.value + s, a.d1, a.d2};
}
template <class T>
Dual2<T> operator+(const T& s, const Dual2<T>& a) {
    return a + s;
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a, const T& s) {
    return {a.value - s, a.d1, a.d2};
}
template <class T>
Dual2<T> operator-(const T& s, const Dual2<T>& a) {
    return {s - a.value, -a.d1, -a.d2};
}
template <class T>
Dual2<T> operator*(const Dual2<T>& a, const T& s) {
    return {a.value * s, a.d1 * s, a.d2 * s};
}
template <class T>
Dual2<T> operator*(const T& s, const Dual2<T>& a) {
    return {s * a.value, s * a.d1, s * a.d2};
}
template <class T>
Dual2<T> operator/(const Dual2<T>& a, const T& s) {
    detail::check_divisor(value_of(a.value), value_of(s));
    return {a.value / s, a.d1 / s, a.d2 / s};
}

template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator+(const Dual2<T>& a, double s) {
    return a + T(s);
}
template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator+(double s, const Dual2<T>& a) {
    return a + T(s);
}
template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator-(const Dual2<T>& a, double s) {
    return a - T(s);
}
template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator-(double s, const Dual2<T>& a) {
    return T(s) - a;
}
template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator*(const Dual2<T>& a, double s) {
    return a * T(s);
}
template <class T>
    requires(!std::same_as<T, double>)
Dual2<T> operator*(double s, const Dual2<T>& a) {
    return T(s) * a;
}

/// Chain rule for a scalar function with value f, first derivative f1 and
/// second derivative f2 at a.value: (f∘a)' = f1 a', (f∘a)'' = f1 a'' + f2 a'^2.
template <class T>
Dual2<T> chain(const Dual2<T>& a, const T& f, const T& f1, const T& f2) {
    return {f, f1 * a.d1, f1 * a.d2 + f2 * a.d1 * a.d1};
}

template <class T>
Dual2<T> tanh(const Dual2<T>& a) {
    using std::tanh;
    const T v = tanh(a.value);
    const T s1 = T(1.0) - v * v;
    return chain(a, v, s1, T(-2.0) * v * s1);
}

template <class T>
Dual2<T> sigmoid(const Dual2<T>& a) {
    const T v = sigmoid(a.value);
    const T s1 = v * (T(1.0) - v);
    return chain(a, v, s1, s1 * (T(1.0) - T(2.0) * v));
}

template <class T>
Dual2<T> exp(const Dual2<T>& a) {
    using std::exp;
    const T v = exp(a.value);
    return chain(a, v, v, v);
}

template <class T>
Dual2<T> sin(const Dual2<T>& a) {
    using std::cos;
    using std::sin;
    const T s = sin(a.value);
    return chain(a, s, cos(a.value), -s);
}

template <class T>
Dual2<T> cos(const Dual2<T>& a) {
    using std::cos;
    using std::sin;
    const T c = cos(a.value);
    return chain(a, c, -sin(a.value), -c);
}

template <class T>
Dual2<T> sqrt(const Dual2<T>& a) {
    using std::sqrt;
    detail::check_sqrt(value_of(a.value));
    const T v = sqrt(a.value);
    const T f1 = T(0.5) / v;
    return chain(a, v, f1, -f1 / (T(2.0) * a.value));
}

template <class T>
Dual2<T> pow(const Dual2<T>& a, double exponent) {
    using std::pow;
    detail::check_pow(value_of(a.value), exponent);
    const T v = pow(a.value, exponent);
    const T f1 = exponent == 0.0 ? T(0.0) : T(exponent) * pow(a.value, exponent - 1.0);
    const double c2 = exponent * (exponent - 1.0);
    if (c2 != 0.0) detail::check_pow(value_of(a.value), exponent - 1.0);
    const T f2 = c2 == 0.0 ? T(0.0) : T(c2) * pow(a.value, exponent - 2.0);
    return chain(a, v, f1, f2);
}

/// max(a, floor). Zero derivative at and below the kink.
template <class T>
Dual2<T> clamp_min(const Dual2<T>& a, double floor) {
    if (value_of(a.value) > floor) return a;
    return constant(T(floor));
}

template <class T>
Dual2<T> select(bool predicate, const Dual2<T>& if_true, const Dual2<T>& if_false) {
    return predicate ? if_true : if_false;
}

} // namespace stpinn
