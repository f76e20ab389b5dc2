#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace polyvem {

/// Second-order forward-mode value in two variables: value, gradient, Hessian.
struct Jet {
    double v = 0.0;
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
    static Jet variable(double value, int i) {
        Jet j(value);
        j.g(i) = 1.0;
        return j;
    }
};

inline Jet operator-(const Jet& a) {
    Jet r;
    r.v = -a.v;
    r.g = -a.g;
    r.H = -a.H;
    return r;
}
inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    r.H = a.H + b.H;
    return r;
}
inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}
inline Jet operator/(const Jet& a, const Jet& b) {
    Jet inv;
    inv.v = 1.0 / b.v;
    inv.g = -b.g / (b.v * b.v);
    inv.H = -b.H / (b.v * b.v) + 2.0 * b.g * b.g.transpose() / (b.v * b.v * b.v);
    return a * inv;
}
inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }

// Apply a scalar function with derivatives d0, d1, d2 at a.v.
inline Jet chain(const Jet& a, double d0, double d1, double d2) {
    Jet r;
    r.v = d0;
    r.g = d1 * a.g;
    r.H = d1 * a.H + d2 * a.g * a.g.transpose();
    return r;
}
inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) { return chain(a, std::exp(a.v), std::exp(a.v), std::exp(a.v)); }

}  // namespace polyvem
