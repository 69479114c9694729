#pragma once

/// @file jet.hpp
/// @brief Second-order forward-mode differentiation in two variables.

#include "sdg/types.hpp"

#include <cmath>

namespace sdg::cases {

struct Jet {
    double v = 0.0;
    Vec2 g = Vec2::Zero();
    Mat2 h = Mat2::Zero();

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor): constants mix freely
    Jet(double value, const Vec2& grad, const Mat2& hess) : v(value), g(grad), h(hess) {}

    static Jet x(double value) { return {value, Vec2::UnitX(), Mat2::Zero()}; }
    static Jet y(double value) { return {value, Vec2::UnitY(), Mat2::Zero()}; }
    double laplacian() const { return h.trace(); }
};

inline Jet operator-(const Jet& a) { return {-a.v, -a.g, -a.h}; }
inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v, a.v * b.g + b.v * a.g, a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
}

/// f(a) given f, f', f'' at a.v.
inline Jet chain(const Jet& a, double f, double df, double d2f)
{
    return {f, df * a.g, df * a.h + d2f * a.g * a.g.transpose()};
}

inline Jet operator/(const Jet& a, const Jet& b)
{
    const double u = b.v;
    return a * chain(b, 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u));
}
inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a)
{
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet sqrt(const Jet& a)
{
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, int n)
{
    if (n == 0) return Jet(1.0);
    const double p1 = std::pow(a.v, n - 1);
    const double p2 = n >= 2 ? std::pow(a.v, n - 2) : 0.0;
    return chain(a, p1 * a.v, n * p1, n * (n - 1) * p2);
}

}  // namespace sdg::cases
