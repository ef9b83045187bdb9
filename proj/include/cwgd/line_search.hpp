#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cwgd/objective.hpp"

/// \file line_search.hpp
///
/// Armijo conditions (standard and coordinate-wise) and the backtracking
/// learning-rate selection procedures built on the candidate ladder
/// {beta^n * delta0 : n >= 0}.

namespace cwgd {

inline constexpr int kDefaultMaxHalvings = 100;

struct LineSearchParams {
    double alpha;
    double beta;
    double delta0;

    LineSearchParams(double a, double b, double d0) : alpha(a), beta(b), delta0(d0) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
        if (!(d0 > 0.0)) throw std::invalid_argument("delta0 must be positive");
    }
};

/// Local smoothness model (r, L) for one coordinate block: the gradient is
/// Lipschitz with constant L(x) on the ball B(x, r(x)).
struct SmoothnessModel {
    std::function<double(const Vector&)> radius;
    std::function<double(const Vector&)> lipschitz;
};

struct DeltaSelection {
    double delta = 0.0;
    int candidates_tested = 0;
    bool exhausted = false;
    int ladder_index = 0;  // delta == beta^ladder_index * delta0 when !exhausted
};

namespace detail {

/// Candidate values beta^n * delta0, generated by repeated multiplication.
class BetaLadder {
public:
    BetaLadder(double beta, double delta0) : beta_(beta) { values_.push_back(delta0); }

    double value(int n) {
        while (static_cast<int>(values_.size()) <= n) values_.push_back(values_.back() * beta_);
        return values_[static_cast<std::size_t>(n)];
    }

    /// Index of the ladder member matching d to relative 1e-9, or -1.
    int index_of(double d, int search_limit = 2 * kDefaultMaxHalvings) {
        for (int n = 0; n <= search_limit; ++n) {
            double v = value(n);
            if (std::fabs(v - d) <= 1e-9 * std::max(v, d)) return n;
            if (v < d) break;  // ladder is decreasing
        }
        return -1;
    }

private:
    double beta_;
    std::vector<double> values_;
};

/// Armijo test reusing cached f(z) and grad(z).  Non-finite trial values
/// count as failure.
inline bool armijo_holds_cached(const DifferentiableFunction& f, const Vector& z, double fz,
                                const Vector& g, double grad_sq, double delta, double alpha) {
    Vector trial(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] - delta * g[i];
    double ft = f.value(trial);
    if (!std::isfinite(ft)) return false;
    return ft - fz <= -alpha * delta * grad_sq;
}

}  // namespace detail

/// Standard Armijo condition: f(z - delta*grad f(z)) - f(z) <= -alpha*delta*||grad f(z)||^2.
inline bool armijo_holds(const DifferentiableFunction& f, const Vector& z, double delta,
                         double alpha) {
    if (!(delta > 0.0)) throw std::invalid_argument("armijo_holds: delta must be positive");
    double fz = eval(f, z);
    Vector g = grad(f, z);
    return detail::armijo_holds_cached(f, z, fz, g, squared_norm(g), delta, alpha);
}

inline bool armijo_holds(const DifferentiableFunction& f, const Point& z, double delta,
                         double alpha) {
    return armijo_holds(f, z.coords, delta, alpha);
}

/// Coordinate-wise Armijo condition for f(x,y) = f1(x) + f2(y):
///   f(x - d1*grad f1, y - d2*grad f2) - f(x,y) <= -alpha*(d1*||grad f1||^2 + d2*||grad f2||^2)
inline bool coordinatewise_armijo_holds(const SeparableObjective& f, const Vector& x,
                                        const Vector& y, double delta1, double delta2,
                                        double alpha) {
    if (!(delta1 > 0.0) || !(delta2 > 0.0))
        throw std::invalid_argument("coordinatewise_armijo_holds: deltas must be positive");
    Vector g1 = grad(f.block1, x);
    Vector g2 = grad(f.block2, y);
    Vector tx(x.size()), ty(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) tx[i] = x[i] - delta1 * g1[i];
    for (std::size_t i = 0; i < y.size(); ++i) ty[i] = y[i] - delta2 * g2[i];
    double lhs = (f.block1.value(tx) + f.block2.value(ty)) -
                 (f.block1.value(x) + f.block2.value(y));
    if (!std::isfinite(lhs)) return false;
    double rhs = -alpha * (delta1 * squared_norm(g1) + delta2 * squared_norm(g2));
    return lhs <= rhs;
}

/// Largest beta^n * delta0 satisfying Armijo's condition; candidates are
/// tried in decreasing order so the first hit is the largest one.
inline DeltaSelection backtracking_delta(const DifferentiableFunction& f, const Vector& z,
                                         const LineSearchParams& params,
                                         int max_halvings = kDefaultMaxHalvings) {
    if (max_halvings < 1) throw std::invalid_argument("max_halvings must be >= 1");
    double fz = eval(f, z);
    Vector g = grad(f, z);
    double grad_sq = squared_norm(g);
    detail::BetaLadder ladder(params.beta, params.delta0);
    for (int n = 0; n < max_halvings; ++n) {
        double d = ladder.value(n);
        if (detail::armijo_holds_cached(f, z, fz, g, grad_sq, d, params.alpha))
            return {d, n + 1, false, n};
    }
    return {ladder.value(max_halvings - 1), max_halvings, true, max_halvings - 1};
}

inline DeltaSelection backtracking_delta(const DifferentiableFunction& f, const Point& z,
                                         const LineSearchParams& params,
                                         int max_halvings = kDefaultMaxHalvings) {
    return backtracking_delta(f, z.coords, params, max_halvings);
}

/// Two-way search: start from the previous step's accepted delta and walk the
/// ladder up (while Armijo keeps holding, capped at delta0) or down (until it
/// holds).  candidates_tested counts Armijo evaluations.
inline DeltaSelection two_way_backtracking_delta(const DifferentiableFunction& f, const Vector& z,
                                                 double previous_delta,
                                                 const LineSearchParams& params,
                                                 int max_moves = kDefaultMaxHalvings) {
    if (max_moves < 1) throw std::invalid_argument("max_moves must be >= 1");
    if (!(previous_delta > 0.0) || previous_delta > params.delta0 * (1.0 + 1e-12))
        throw std::invalid_argument("previous_delta must lie in (0, delta0]");
    double fz = eval(f, z);
    Vector g = grad(f, z);
    double grad_sq = squared_norm(g);
    detail::BetaLadder ladder(params.beta, params.delta0);

    int k = ladder.index_of(previous_delta);
    if (k < 0) {
        // Previous delta off the ladder; restart from the top.
        return backtracking_delta(f, z, params, max_moves);
    }
    int tested = 1;
    if (detail::armijo_holds_cached(f, z, fz, g, grad_sq, ladder.value(k), params.alpha)) {
        while (k > 0 && tested < max_moves) {
            ++tested;
            if (!detail::armijo_holds_cached(f, z, fz, g, grad_sq, ladder.value(k - 1),
                                             params.alpha))
                break;
            --k;
        }
        return {ladder.value(k), tested, false, k};
    }
    while (tested < max_moves) {
        ++k;
        ++tested;
        if (detail::armijo_holds_cached(f, z, fz, g, grad_sq, ladder.value(k), params.alpha))
            return {ladder.value(k), tested, false, k};
    }
    return {ladder.value(k), tested, true, k};
}

/// Largest beta^n * delta0 with delta < alpha/L strictly and
/// delta * ||grad|| < r strictly.
inline DeltaSelection gdnew_delta(double gradient_norm, double r_at_x, double l_at_x,
                                  const LineSearchParams& params,
                                  int max_halvings = kDefaultMaxHalvings) {
    if (!(gradient_norm >= 0.0)) throw std::invalid_argument("gdnew_delta: negative gradient norm");
    if (!(r_at_x > 0.0) || !(l_at_x > 0.0))
        throw std::invalid_argument("gdnew_delta: r and L must be positive");
    detail::BetaLadder ladder(params.beta, params.delta0);
    for (int n = 0; n < max_halvings; ++n) {
        double d = ladder.value(n);
        if (d < params.alpha / l_at_x && d * gradient_norm < r_at_x) return {d, n + 1, false, n};
    }
    return {ladder.value(max_halvings - 1), max_halvings, true, max_halvings - 1};
}

enum class SelectionMethod { PlainBacktracking, TwoWay, GdNew };

/// Per-block selection for a separable objective: block 1 at x, block 2 at y,
/// chosen independently.  GdNew requires the pair of smoothness models;
/// TwoWay uses the caller-held previous deltas (defaulting to delta0).
inline std::pair<DeltaSelection, DeltaSelection> coordinatewise_deltas(
    const SeparableObjective& f, const Vector& z, SelectionMethod method,
    const LineSearchParams& params,
    const std::optional<std::pair<SmoothnessModel, SmoothnessModel>>& models = std::nullopt,
    const std::optional<std::pair<double, double>>& previous = std::nullopt,
    int max_halvings = kDefaultMaxHalvings) {
    Vector x = f.split1(z);
    Vector y = f.split2(z);
    switch (method) {
        case SelectionMethod::PlainBacktracking:
            return {backtracking_delta(f.block1, x, params, max_halvings),
                    backtracking_delta(f.block2, y, params, max_halvings)};
        case SelectionMethod::TwoWay: {
            double p1 = previous ? previous->first : params.delta0;
            double p2 = previous ? previous->second : params.delta0;
            return {two_way_backtracking_delta(f.block1, x, p1, params, max_halvings),
                    two_way_backtracking_delta(f.block2, y, p2, params, max_halvings)};
        }
        case SelectionMethod::GdNew: {
            if (!models)
                throw std::invalid_argument("coordinatewise_deltas: GdNew requires smoothness models");
            double gn1 = norm(grad(f.block1, x));
            double gn2 = norm(grad(f.block2, y));
            return {gdnew_delta(gn1, models->first.radius(x), models->first.lipschitz(x), params,
                                max_halvings),
                    gdnew_delta(gn2, models->second.radius(y), models->second.lipschitz(y), params,
                                max_halvings)};
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace cwgd
