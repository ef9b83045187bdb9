#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cwgd/line_search.hpp"
#include "cwgd/objective.hpp"

/// \file analysis.hpp
///
/// Critical-point oracles, minimum/saddle classification, and the smoothness
/// model for the oscillatory example.

namespace cwgd {

enum class CriticalKind { LocalMinimum, GeneralizedSaddle, Degenerate, Origin };

inline const char* to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::LocalMinimum: return "local-minimum";
        case CriticalKind::GeneralizedSaddle: return "generalized-saddle";
        case CriticalKind::Degenerate: return "degenerate";
        case CriticalKind::Origin: return "origin";
    }
    return "?";
}

struct CriticalPointClass {
    CriticalKind kind = CriticalKind::Degenerate;
    std::vector<int> eigen_signs;  // -1, 0, +1 per Hessian eigenvalue
    double tolerance_used = 0.0;
    bool near_nonsmooth = false;  // set when the probe stencil touches a non-C^2 locus
};

struct CatalogEntry {
    double location;
    CriticalPointClass cls;
};

/// Critical points of a 1-D function on a window, strictly increasing in
/// location.
using CriticalPointCatalog = std::vector<CatalogEntry>;

namespace detail {

inline CriticalKind kind_from_signs(const std::vector<int>& signs) {
    bool has_negative = false, has_zero = false;
    for (int s : signs) {
        if (s < 0) has_negative = true;
        if (s == 0) has_zero = true;
    }
    if (has_negative) return CriticalKind::GeneralizedSaddle;
    if (has_zero) return CriticalKind::Degenerate;
    return CriticalKind::LocalMinimum;
}

}  // namespace detail

/// Smoothness model for the 1-D block g: r(t) = shrink*|t| and L(t) the
/// endpoint maximum of the envelope 6|s| + 4 + 1/|s| over s in
/// {|t| - r(t), |t| + r(t)}.  The envelope dominates |g''| and is convex in
/// |s| on (0, inf), so its maximum over the ball is attained at an endpoint.
/// Queries at t = 0 return NaN; the GD-New drivers treat the zero-gradient
/// point there as a zero step.
inline SmoothnessModel example_smoothness_model(double shrink) {
    if (!(shrink > 0.0 && shrink < 1.0))
        throw std::invalid_argument("example_smoothness_model: shrink must lie in (0,1)");
    return SmoothnessModel{
        [shrink](const Vector& p) {
            double a = std::fabs(p[0]);
            if (a == 0.0) return std::nan("");
            return shrink * a;
        },
        [shrink](const Vector& p) {
            double a = std::fabs(p[0]);
            if (a == 0.0) return std::nan("");
            double lo = a * (1.0 - shrink);
            double hi = a * (1.0 + shrink);
            return std::max(g_curvature_envelope(lo), g_curvature_envelope(hi));
        }};
}

/// 2-D analog for the full-space GD-New on g(x) + g(y): the ball must avoid
/// both axes, so r(z) = shrink*min(|x|,|y|), and the Hessian is
/// diag(g''(x), g''(y)), so the envelope maximum over either coordinate
/// interval bounds the operator norm.
inline SmoothnessModel example_smoothness_model_2d(double shrink) {
    if (!(shrink > 0.0 && shrink < 1.0))
        throw std::invalid_argument("example_smoothness_model_2d: shrink must lie in (0,1)");
    return SmoothnessModel{
        [shrink](const Vector& z) {
            double m = std::min(std::fabs(z[0]), std::fabs(z[1]));
            if (m == 0.0) return std::nan("");
            return shrink * m;
        },
        [shrink](const Vector& z) {
            double m = std::min(std::fabs(z[0]), std::fabs(z[1]));
            if (m == 0.0) return std::nan("");
            double r = shrink * m;
            double worst = 0.0;
            for (int i = 0; i < 2; ++i) {
                double a = std::fabs(z[i]);
                worst = std::max({worst, g_curvature_envelope(a - r), g_curvature_envelope(a + r)});
            }
            return worst;
        }};
}

/// L(x) replaced by max{L(x), floor}, per the modified-sequence construction.
inline SmoothnessModel with_lipschitz_floor(SmoothnessModel model, double floor) {
    if (!(floor > 0.0)) throw std::invalid_argument("with_lipschitz_floor: floor must be positive");
    auto lip = model.lipschitz;
    model.lipschitz = [lip, floor](const Vector& p) { return std::max(lip(p), floor); };
    return model;
}

/// Central-difference Hessian classification.  `nonsmooth_distance`, when
/// finite, marks the distance from z to the nearest non-C^2 locus; a stencil
/// reaching within 10h of it yields a flagged Degenerate instead of trusting
/// the differences.
inline CriticalPointClass classify_critical_point(const DifferentiableFunction& f, const Vector& z,
                                                  double h = 1e-4, double tol_scale = 1e-4,
                                                  double nonsmooth_distance =
                                                      std::numeric_limits<double>::infinity()) {
    if (!(h > 0.0)) throw std::invalid_argument("classify_critical_point: h must be positive");
    check_dimension(f, z);
    int d = f.dimension;

    CriticalPointClass out;
    if (nonsmooth_distance < 10.0 * h) {
        out.kind = CriticalKind::Degenerate;
        out.near_nonsmooth = true;
        out.tolerance_used = tol_scale;
        return out;
    }

    Eigen::MatrixXd hess(d, d);
    Vector p = z;
    double fz = f.value(z);
    for (int i = 0; i < d; ++i) {
        p[i] = z[i] + h;
        double fp = f.value(p);
        p[i] = z[i] - h;
        double fm = f.value(p);
        p[i] = z[i];
        hess(i, i) = (fp - 2.0 * fz + fm) / (h * h);
        for (int j = i + 1; j < d; ++j) {
            p[i] = z[i] + h; p[j] = z[j] + h;
            double fpp = f.value(p);
            p[j] = z[j] - h;
            double fpm = f.value(p);
            p[i] = z[i] - h; p[j] = z[j] + h;
            double fmp = f.value(p);
            p[j] = z[j] - h;
            double fmm = f.value(p);
            p[i] = z[i]; p[j] = z[j];
            double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess);
    Eigen::VectorXd lambda = solver.eigenvalues();
    double max_abs = lambda.cwiseAbs().maxCoeff();
    double tol = tol_scale * (1.0 + max_abs);
    out.tolerance_used = tol;
    for (int i = 0; i < d; ++i) {
        double l = lambda(i);
        out.eigen_signs.push_back(l < -tol ? -1 : (l > tol ? 1 : 0));
    }
    out.kind = detail::kind_from_signs(out.eigen_signs);
    return out;
}

/// Classification of a limit of the 2-D example f(x,y) = g(x) + g(y), using
/// the closed-form second derivative per block.  The Origin class fires
/// within `origin_radius` of (0,0); points within `axis_margin` of an axis
/// are flagged Degenerate (no second derivative there to trust).
inline CriticalPointClass classify_example_g2d_point(const Vector& z, double tol = 1e-4,
                                                     double origin_radius = 1e-4,
                                                     double axis_margin = 1e-3) {
    CriticalPointClass out;
    out.tolerance_used = tol;
    if (norm(z) < origin_radius) {
        out.kind = CriticalKind::Origin;
        return out;
    }
    if (std::fabs(z[0]) < axis_margin || std::fabs(z[1]) < axis_margin) {
        out.kind = CriticalKind::Degenerate;
        out.near_nonsmooth = true;
        return out;
    }
    for (double t : z) {
        double l = g_second_derivative(t);
        out.eigen_signs.push_back(l < -tol ? -1 : (l > tol ? 1 : 0));
    }
    out.kind = detail::kind_from_signs(out.eigen_signs);
    return out;
}

/// Sign-change scan of f' on a uniform grid, each bracket refined by
/// bisection to width 1e-12, roots classified by a central difference of f'.
/// Windows where roots accumulate faster than the grid under-count; for the
/// example keep the window away from 0 or raise the density.
inline CriticalPointCatalog find_critical_points_1d(const DifferentiableFunction& f, double lo,
                                                    double hi, int grid) {
    if (f.dimension != 1) throw std::invalid_argument("find_critical_points_1d: 1-D only");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("find_critical_points_1d: bad window");
    if (grid < 2) throw std::invalid_argument("find_critical_points_1d: grid must be >= 2");

    auto deriv = [&f](double t) { return f.gradient(Vector{t})[0]; };

    CriticalPointCatalog catalog;
    double step = (hi - lo) / grid;
    double prev_t = lo;
    double prev_d = deriv(lo);
    for (int i = 1; i <= grid; ++i) {
        double t = lo + i * step;
        double dv = deriv(t);
        if (prev_d == 0.0 || prev_d * dv < 0.0) {
            double a = prev_t, b = t;
            if (prev_d == 0.0) {
                a = b = prev_t;
            } else {
                while (b - a > 1e-12) {
                    double mid = 0.5 * (a + b);
                    double dm = deriv(mid);
                    if (dm == 0.0) { a = b = mid; break; }
                    if (prev_d * dm < 0.0)
                        b = mid;
                    else
                        a = mid;
                }
            }
            double root = 0.5 * (a + b);
            double h = std::max(1e-7, 1e-7 * std::fabs(root));
            double second = (deriv(root + h) - deriv(root - h)) / (2.0 * h);
            CriticalPointClass cls;
            double tol = 1e-4 * (1.0 + std::fabs(second));
            cls.tolerance_used = tol;
            cls.eigen_signs = {second < -tol ? -1 : (second > tol ? 1 : 0)};
            cls.kind = detail::kind_from_signs(cls.eigen_signs);
            if (catalog.empty() || root > catalog.back().location + 1e-12)
                catalog.push_back({root, cls});
        }
        prev_t = t;
        prev_d = dv;
    }
    return catalog;
}

}  // namespace cwgd
