#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwgd/line_search.hpp"
#include "cwgd/objective.hpp"

/// \file optimize.hpp
///
/// Iteration drivers producing full trajectories for Standard GD, the
/// backtracking family, and the GD-New variants.

namespace cwgd {

enum class VerdictKind { CriticalPoint, DivergedToInfinity, MaxIterations, NumericalBreakdown };

inline const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::CriticalPoint: return "critical-point";
        case VerdictKind::DivergedToInfinity: return "diverged";
        case VerdictKind::MaxIterations: return "max-iterations";
        case VerdictKind::NumericalBreakdown: return "numerical-breakdown";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::MaxIterations;
    std::optional<Vector> limit_point;  // present iff kind == CriticalPoint
    double final_gradient_norm = 0.0;
};

struct IterateRecord {
    long n = 0;
    Vector z;
    double value = 0.0;
    double grad_norm = 0.0;
    std::optional<double> delta1;     // unset on the final record
    std::optional<double> delta2;     // set only for coordinate-wise methods
    std::optional<double> step_norm;  // unset on the final record
};

struct StoppingRule {
    long max_iterations = 100000;
    double gradient_tolerance = 1e-8;
    double divergence_radius = 1e8;
    double stall_step_tolerance = 0.0;  // 0 disables the stall check

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
        if (!(gradient_tolerance > 0.0))
            throw std::invalid_argument("gradient_tolerance must be positive");
        if (!(divergence_radius > 0.0))
            throw std::invalid_argument("divergence_radius must be positive");
        if (stall_step_tolerance < 0.0)
            throw std::invalid_argument("stall_step_tolerance must be >= 0");
    }
};

enum class MethodTag {
    StandardGd,
    BacktrackingGd,
    TwoWayBacktrackingGd,
    CoordinatewiseBacktrackingGd,
    CoordinatewiseTwoWayGd,
    CoordinatewiseGdNew,
    FullSpaceGdNew,
};

inline const char* to_string(MethodTag m) {
    switch (m) {
        case MethodTag::StandardGd: return "standard";
        case MethodTag::BacktrackingGd: return "backtracking";
        case MethodTag::TwoWayBacktrackingGd: return "two-way";
        case MethodTag::CoordinatewiseBacktrackingGd: return "coordinatewise-backtracking";
        case MethodTag::CoordinatewiseTwoWayGd: return "coordinatewise-two-way";
        case MethodTag::CoordinatewiseGdNew: return "coordinatewise-gdnew";
        case MethodTag::FullSpaceGdNew: return "gdnew-full";
    }
    return "?";
}

struct Trajectory {
    std::vector<IterateRecord> records;
    Verdict verdict;
    MethodTag method = MethodTag::BacktrackingGd;
    std::optional<LineSearchParams> params;  // absent for Standard GD
    double fixed_delta0 = 0.0;               // Standard GD only

    const IterateRecord& final_record() const { return records.back(); }
};

/// Finite-truncation proxy for the paper-style dichotomy: critical point,
/// divergence to infinity, or budget exhaustion.  Returns nullopt to continue.
inline std::optional<Verdict> classify_termination(const Vector& z, double grad_norm, long n,
                                                   const StoppingRule& stop) {
    if (grad_norm < stop.gradient_tolerance)
        return Verdict{VerdictKind::CriticalPoint, z, grad_norm};
    if (norm(z) > stop.divergence_radius)
        return Verdict{VerdictKind::DivergedToInfinity, std::nullopt, grad_norm};
    if (n >= stop.max_iterations)
        return Verdict{VerdictKind::MaxIterations, std::nullopt, grad_norm};
    return std::nullopt;
}

namespace detail {

/// One accepted step: the chosen delta(s) and the resulting next point, or a
/// breakdown signal.
struct StepOutcome {
    Vector next;
    double delta1 = 0.0;
    std::optional<double> delta2;
    bool breakdown = false;
};

/// Shared iteration skeleton.  `step` is called with the current point and
/// its gradient, and must either produce the next point or flag a breakdown.
template <class ValueFn, class GradFn, class StepFn>
Trajectory run_loop(ValueFn&& value, GradFn&& gradient, const Vector& z0,
                    const StoppingRule& stop, MethodTag method,
                    std::optional<LineSearchParams> params, double fixed_delta0, StepFn&& step) {
    stop.validate();
    Trajectory traj;
    traj.method = method;
    traj.params = params;
    traj.fixed_delta0 = fixed_delta0;

    Vector z = z0;
    for (long n = 0;; ++n) {
        double fz = value(z);
        Vector g = gradient(z);
        double gnorm = norm(g);

        IterateRecord rec;
        rec.n = n;
        rec.z = z;
        rec.value = fz;
        rec.grad_norm = gnorm;
        traj.records.push_back(rec);

        if (!std::isfinite(fz) || !all_finite(g) || !all_finite(z)) {
            traj.verdict = Verdict{VerdictKind::NumericalBreakdown, std::nullopt, gnorm};
            return traj;
        }
        if (auto v = classify_termination(z, gnorm, n, stop)) {
            traj.verdict = *v;
            return traj;
        }

        StepOutcome out = step(z, g);
        if (out.breakdown) {
            traj.verdict = Verdict{VerdictKind::NumericalBreakdown, std::nullopt, gnorm};
            return traj;
        }
        double stepn = distance(out.next, z);
        IterateRecord& back = traj.records.back();
        back.delta1 = out.delta1;
        back.delta2 = out.delta2;
        back.step_norm = stepn;

        if (stop.stall_step_tolerance > 0.0 && stepn < stop.stall_step_tolerance && n > 0) {
            traj.verdict = Verdict{VerdictKind::MaxIterations, std::nullopt, gnorm};
            return traj;
        }
        z = std::move(out.next);
    }
}

inline Vector take_step(const Vector& z, const Vector& g, double delta) {
    Vector next(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) next[i] = z[i] - delta * g[i];
    return next;
}

/// Per-block step for separable objectives.
inline Vector take_block_step(const SeparableObjective& f, const Vector& z, const Vector& g,
                              double d1, double d2) {
    Vector next(z.size());
    int m1 = f.m1();
    for (int i = 0; i < m1; ++i) next[i] = z[i] - d1 * g[i];
    for (int i = m1; i < f.dimension(); ++i) next[i] = z[i] - d2 * g[i];
    return next;
}

}  // namespace detail

inline Trajectory run_standard_gd(const DifferentiableFunction& f, const Vector& z0, double delta0,
                                  const StoppingRule& stop) {
    if (!(delta0 > 0.0)) throw std::invalid_argument("run_standard_gd: delta0 must be positive");
    check_dimension(f, z0);
    return detail::run_loop(
        f.value, f.gradient, z0, stop, MethodTag::StandardGd, std::nullopt, delta0,
        [&](const Vector& z, const Vector& g) {
            return detail::StepOutcome{detail::take_step(z, g, delta0), delta0, std::nullopt, false};
        });
}

inline Trajectory run_backtracking_gd(const DifferentiableFunction& f, const Vector& z0,
                                      const LineSearchParams& params, const StoppingRule& stop) {
    check_dimension(f, z0);
    return detail::run_loop(
        f.value, f.gradient, z0, stop, MethodTag::BacktrackingGd, params, 0.0,
        [&](const Vector& z, const Vector& g) {
            DeltaSelection sel = backtracking_delta(f, z, params);
            return detail::StepOutcome{detail::take_step(z, g, sel.delta), sel.delta, std::nullopt,
                                       false};
        });
}

inline Trajectory run_two_way_backtracking_gd(const DifferentiableFunction& f, const Vector& z0,
                                              const LineSearchParams& params,
                                              const StoppingRule& stop) {
    check_dimension(f, z0);
    double previous = params.delta0;  // first step starts at delta0
    return detail::run_loop(
        f.value, f.gradient, z0, stop, MethodTag::TwoWayBacktrackingGd, params, 0.0,
        [&, previous](const Vector& z, const Vector& g) mutable {
            DeltaSelection sel = two_way_backtracking_delta(f, z, previous, params);
            previous = sel.delta;
            return detail::StepOutcome{detail::take_step(z, g, sel.delta), sel.delta, std::nullopt,
                                       false};
        });
}

inline Trajectory run_coordinatewise_backtracking_gd(const SeparableObjective& f, const Vector& z0,
                                                     const LineSearchParams& params,
                                                     const StoppingRule& stop) {
    if (static_cast<int>(z0.size()) != f.dimension())
        throw std::invalid_argument("dimension mismatch");
    return detail::run_loop(
        [&f](const Vector& z) { return f.value(z); }, [&f](const Vector& z) { return f.gradient(z); },
        z0, stop, MethodTag::CoordinatewiseBacktrackingGd, params, 0.0,
        [&](const Vector& z, const Vector& g) {
            auto [s1, s2] =
                coordinatewise_deltas(f, z, SelectionMethod::PlainBacktracking, params);
            return detail::StepOutcome{detail::take_block_step(f, z, g, s1.delta, s2.delta),
                                       s1.delta, s2.delta, false};
        });
}

/// Coordinate-wise two-way variant: each block carries its own previous delta.
inline Trajectory run_coordinatewise_two_way_gd(const SeparableObjective& f, const Vector& z0,
                                                const LineSearchParams& params,
                                                const StoppingRule& stop) {
    if (static_cast<int>(z0.size()) != f.dimension())
        throw std::invalid_argument("dimension mismatch");
    std::pair<double, double> previous{params.delta0, params.delta0};
    return detail::run_loop(
        [&f](const Vector& z) { return f.value(z); }, [&f](const Vector& z) { return f.gradient(z); },
        z0, stop, MethodTag::CoordinatewiseTwoWayGd, params, 0.0,
        [&, previous](const Vector& z, const Vector& g) mutable {
            auto [s1, s2] = coordinatewise_deltas(f, z, SelectionMethod::TwoWay, params,
                                                  std::nullopt, previous);
            previous = {s1.delta, s2.delta};
            return detail::StepOutcome{detail::take_block_step(f, z, g, s1.delta, s2.delta),
                                       s1.delta, s2.delta, false};
        });
}

inline Trajectory run_coordinatewise_gdnew(const SeparableObjective& f, const Vector& z0,
                                           const LineSearchParams& params,
                                           const std::pair<SmoothnessModel, SmoothnessModel>& models,
                                           const StoppingRule& stop) {
    if (static_cast<int>(z0.size()) != f.dimension())
        throw std::invalid_argument("dimension mismatch");
    return detail::run_loop(
        [&f](const Vector& z) { return f.value(z); }, [&f](const Vector& z) { return f.gradient(z); },
        z0, stop, MethodTag::CoordinatewiseGdNew, params, 0.0,
        [&](const Vector& z, const Vector& g) {
            Vector x = f.split1(z);
            Vector y = f.split2(z);
            detail::StepOutcome out;
            // A block at an exact critical point steps by zero regardless of
            // the model; the model may be undefined there (the example at 0).
            auto select = [&](const DifferentiableFunction& block, const Vector& p,
                              const SmoothnessModel& model, double& delta_out) {
                Vector gb = grad(block, p);
                double gn = norm(gb);
                if (gn == 0.0) {
                    delta_out = params.delta0;
                    return true;
                }
                double r = model.radius(p);
                double l = model.lipschitz(p);
                if (!(r > 0.0) || !(l > 0.0) || !std::isfinite(r) || !std::isfinite(l))
                    return false;
                delta_out = gdnew_delta(gn, r, l, params).delta;
                return true;
            };
            double d1 = 0.0, d2 = 0.0;
            if (!select(f.block1, x, models.first, d1) || !select(f.block2, y, models.second, d2)) {
                out.breakdown = true;
                return out;
            }
            out.next = detail::take_block_step(f, z, g, d1, d2);
            out.delta1 = d1;
            out.delta2 = d2;
            return out;
        });
}

/// Full-space GD-New: one delta for the whole gradient, capped by a model on
/// the product space.
inline Trajectory run_gdnew(const DifferentiableFunction& f, const Vector& z0,
                            const LineSearchParams& params, const SmoothnessModel& model,
                            const StoppingRule& stop) {
    check_dimension(f, z0);
    return detail::run_loop(
        f.value, f.gradient, z0, stop, MethodTag::FullSpaceGdNew, params, 0.0,
        [&](const Vector& z, const Vector& g) {
            detail::StepOutcome out;
            double gn = norm(g);
            if (gn == 0.0) {
                out.next = z;
                out.delta1 = params.delta0;
                return out;
            }
            double r = model.radius(z);
            double l = model.lipschitz(z);
            if (!(r > 0.0) || !(l > 0.0) || !std::isfinite(r) || !std::isfinite(l)) {
                out.breakdown = true;
                return out;
            }
            double d = gdnew_delta(gn, r, l, params).delta;
            out.next = detail::take_step(z, g, d);
            out.delta1 = d;
            return out;
        });
}

}  // namespace cwgd
