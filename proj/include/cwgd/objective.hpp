#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/// \file objective.hpp
///
/// Objective-function abstractions, the oscillatory example g(t) = t^3 sin(1/t),
/// and finite-difference validation utilities.

namespace cwgd {

using Vector = std::vector<double>;

inline double squared_norm(const Vector& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return s;
}

inline double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

inline double distance(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(const Vector& v) {
    for (double c : v)
        if (!std::isfinite(c)) return false;
    return true;
}

/// A point in R^d, optionally carrying the (m1, m2) block decomposition
/// z = (x, y).
struct Point {
    Vector coords;
    std::optional<std::pair<int, int>> block_split;

    Point() = default;
    Point(Vector c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}
    Point(Vector c, int m1, int m2) : coords(std::move(c)), block_split({m1, m2}) {
        if (m1 + m2 != static_cast<int>(coords.size()))
            throw std::invalid_argument("Point: block split m1+m2 != dimension");
    }

    int dimension() const { return static_cast<int>(coords.size()); }

    Vector block1() const {
        require_split();
        return Vector(coords.begin(), coords.begin() + block_split->first);
    }
    Vector block2() const {
        require_split();
        return Vector(coords.begin() + block_split->first, coords.end());
    }

private:
    void require_split() const {
        if (!block_split) throw std::logic_error("Point: no block split present");
    }
};

/// A d-dimensional C^1 function given by its value and analytic gradient.
/// Immutable after construction; safe to share across threads.
struct DifferentiableFunction {
    int dimension = 0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
};

inline void check_dimension(const DifferentiableFunction& f, const Vector& p) {
    if (static_cast<int>(p.size()) != f.dimension)
        throw std::invalid_argument("dimension mismatch: point has " +
                                    std::to_string(p.size()) + " coordinates, function expects " +
                                    std::to_string(f.dimension));
}

inline double eval(const DifferentiableFunction& f, const Vector& p) {
    check_dimension(f, p);
    return f.value(p);
}

inline double eval(const DifferentiableFunction& f, const Point& p) { return eval(f, p.coords); }

inline Vector grad(const DifferentiableFunction& f, const Vector& p) {
    check_dimension(f, p);
    Vector g = f.gradient(p);
    if (static_cast<int>(g.size()) != f.dimension)
        throw std::logic_error("gradient evaluator returned wrong length");
    return g;
}

inline Vector grad(const DifferentiableFunction& f, const Point& p) { return grad(f, p.coords); }

/// Max over coordinates of the error between the analytic gradient and a
/// central difference, relative to max(1, |analytic|, |difference|).
inline double fd_gradient_check(const DifferentiableFunction& f, const Vector& p, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_gradient_check: h must be positive");
    check_dimension(f, p);
    Vector g = grad(f, p);
    Vector hi = p, lo = p;
    double worst = 0.0;
    for (int i = 0; i < f.dimension; ++i) {
        hi[i] = p[i] + h;
        lo[i] = p[i] - h;
        double fd = (f.value(hi) - f.value(lo)) / (2.0 * h);
        hi[i] = p[i];
        lo[i] = p[i];
        double scale = std::max({1.0, std::fabs(g[i]), std::fabs(fd)});
        worst = std::max(worst, std::fabs(g[i] - fd) / scale);
    }
    return worst;
}

inline double fd_gradient_check(const DifferentiableFunction& f, const Point& p, double h) {
    return fd_gradient_check(f, p.coords, h);
}

/// f(x,y) = f1(x) + f2(y) kept as two independent blocks.
struct SeparableObjective {
    DifferentiableFunction block1;
    DifferentiableFunction block2;

    int m1() const { return block1.dimension; }
    int m2() const { return block2.dimension; }
    int dimension() const { return m1() + m2(); }

    Vector split1(const Vector& z) const { return Vector(z.begin(), z.begin() + m1()); }
    Vector split2(const Vector& z) const { return Vector(z.begin() + m1(), z.end()); }

    double value(const Vector& z) const {
        return block1.value(split1(z)) + block2.value(split2(z));
    }

    Vector gradient(const Vector& z) const {
        Vector g1 = block1.gradient(split1(z));
        Vector g2 = block2.gradient(split2(z));
        g1.insert(g1.end(), g2.begin(), g2.end());
        return g1;
    }

    /// Full-space view, for feeding the non-coordinate-wise procedures.
    DifferentiableFunction combined() const {
        SeparableObjective self = *this;
        return DifferentiableFunction{
            dimension(),
            [self](const Vector& z) { return self.value(z); },
            [self](const Vector& z) { return self.gradient(z); }};
    }
};

// ---------------------------------------------------------------------------
// Stock objectives
// ---------------------------------------------------------------------------

/// f(z) = lambda/2 * ||z||^2
inline DifferentiableFunction make_quadratic(double lambda, int dim) {
    if (dim <= 0) throw std::invalid_argument("make_quadratic: dim must be positive");
    return DifferentiableFunction{
        dim,
        [lambda](const Vector& z) { return 0.5 * lambda * squared_norm(z); },
        [lambda, dim](const Vector& z) {
            Vector g(dim);
            for (int i = 0; i < dim; ++i) g[i] = lambda * z[i];
            return g;
        }};
}

/// f(z) = 1/2 * sum_i c_i z_i^2 with per-coordinate curvatures c_i > 0.
inline DifferentiableFunction make_diag_quadratic(Vector coeffs) {
    int dim = static_cast<int>(coeffs.size());
    if (dim == 0) throw std::invalid_argument("make_diag_quadratic: empty coefficient list");
    return DifferentiableFunction{
        dim,
        [coeffs](const Vector& z) {
            double s = 0.0;
            for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * z[i] * z[i];
            return 0.5 * s;
        },
        [coeffs, dim](const Vector& z) {
            Vector g(dim);
            for (int i = 0; i < dim; ++i) g[i] = coeffs[i] * z[i];
            return g;
        }};
}

/// g(t) = t^3 sin(1/t), extended by g(0) = 0.
inline double example_g_value(double t) {
    if (t == 0.0) return 0.0;
    return t * t * t * std::sin(1.0 / t);
}

/// g'(t) = 3t^2 sin(1/t) - t cos(1/t), extended by g'(0) = 0.
inline double example_g_derivative(double t) {
    if (t == 0.0) return 0.0;
    return 3.0 * t * t * std::sin(1.0 / t) - t * std::cos(1.0 / t);
}

/// g''(t) = 6t sin(1/t) - 4 cos(1/t) - sin(1/t)/t.  Does not exist at t = 0.
inline double g_second_derivative(double t) {
    if (t == 0.0)
        throw std::invalid_argument("g_second_derivative: does not exist at 0");
    return 6.0 * t * std::sin(1.0 / t) - 4.0 * std::cos(1.0 / t) - std::sin(1.0 / t) / t;
}

/// Envelope bound for |g''|: 6|t| + 4 + 1/|t|, valid for t != 0.
inline double g_curvature_envelope(double t) {
    double a = std::fabs(t);
    return 6.0 * a + 4.0 + 1.0 / a;
}

/// The 1-D oscillatory block g.
inline DifferentiableFunction make_example_g() {
    return DifferentiableFunction{
        1,
        [](const Vector& z) { return example_g_value(z[0]); },
        [](const Vector& z) { return Vector{example_g_derivative(z[0])}; }};
}

/// f(x,y) = g(x) + g(y) as a separable objective.
inline SeparableObjective make_example_separable() {
    return SeparableObjective{make_example_g(), make_example_g()};
}

/// f(x,y) = g(x) + g(y) as a plain 2-D function.
inline DifferentiableFunction make_example_g2d() {
    return make_example_separable().combined();
}

}  // namespace cwgd
