#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cwgd/analysis.hpp"
#include "cwgd/optimize.hpp"

/// \file experiments.hpp
///
/// Monte-Carlo experiments: the max-inequality falsification harness for the
/// coordinate-wise remark, the basin-of-attraction study, and the full-space
/// dichotomy check.  Trajectories are independent; each owns a generator
/// seeded from (master seed, index), so results do not depend on scheduling.

namespace cwgd {

// ---------------------------------------------------------------------------
// Deterministic RNG and worker pool
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Uniform draws layered over mt19937_64 with a fixed bit-to-double mapping,
/// so identical seeds give identical streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t master, std::uint64_t index)
        : engine_(detail::splitmix64(master ^ detail::splitmix64(index + 1))) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int a, int b) {  // inclusive
        return a + static_cast<int>(engine_() % static_cast<std::uint64_t>(b - a + 1));
    }

private:
    std::mt19937_64 engine_;
};

inline int worker_count() {
    if (const char* env = std::getenv("CWGD_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, n) across the worker pool.  Each index is
/// processed exactly once; the body writes only to its own slot.
template <class Body>
void parallel_for(long n, Body&& body) {
    int workers = std::min<long>(worker_count(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Remark inequality:  delta(x,y) <= max{delta1(x), delta2(y)}
// ---------------------------------------------------------------------------

struct RemarkInstance {
    long index = 0;
    int m1 = 0, m2 = 0;
    double alpha = 0, beta = 0, delta0 = 0;
    double delta_full = 0, delta1 = 0, delta2 = 0;
    bool exhausted = false;
    bool exceeds_min = false;   // delta(x,y) > min{delta1, delta2}
    bool violates_max = false;  // delta(x,y) > max{delta1, delta2} -- falsification
};

struct RemarkReport {
    long instances = 0;
    long max_violations = 0;
    long min_exceed_count = 0;
    long exhausted_skipped = 0;
    std::vector<RemarkInstance> rows;
    std::vector<long> violation_indices;

    double min_exceed_frequency() const {
        long checked = instances - exhausted_skipped;
        return checked > 0 ? static_cast<double>(min_exceed_count) / checked : 0.0;
    }
    bool passed() const { return max_violations == 0; }
};

/// Random separable diagonal quadratics, random point, random valid params.
/// Any max-inequality violation identifies its instance.
inline RemarkReport remark_inequality_experiment(long instance_count, std::uint64_t seed) {
    if (instance_count < 1) throw std::invalid_argument("instance_count must be >= 1");
    RemarkReport report;
    report.instances = instance_count;
    report.rows.resize(instance_count);

    parallel_for(instance_count, [&](long i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        RemarkInstance inst;
        inst.index = i;
        inst.m1 = rng.uniform_int(1, 5);
        inst.m2 = rng.uniform_int(1, 5);
        auto draw_coeffs = [&](int m) {
            Vector c(m);
            for (double& v : c) v = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
            return c;
        };
        SeparableObjective f{make_diag_quadratic(draw_coeffs(inst.m1)),
                             make_diag_quadratic(draw_coeffs(inst.m2))};
        Vector z(f.dimension());
        for (double& v : z) v = rng.uniform(-2.0, 2.0);
        inst.alpha = rng.uniform(0.05, 0.95);
        inst.beta = rng.uniform(0.1, 0.9);
        inst.delta0 = rng.uniform(0.5, 4.0);
        LineSearchParams params(inst.alpha, inst.beta, inst.delta0);

        DeltaSelection full = backtracking_delta(f.combined(), z, params);
        auto [s1, s2] = coordinatewise_deltas(f, z, SelectionMethod::PlainBacktracking, params);
        inst.delta_full = full.delta;
        inst.delta1 = s1.delta;
        inst.delta2 = s2.delta;
        inst.exhausted = full.exhausted || s1.exhausted || s2.exhausted;
        if (!inst.exhausted) {
            inst.violates_max = full.delta > std::max(s1.delta, s2.delta);
            inst.exceeds_min = full.delta > std::min(s1.delta, s2.delta);
        }
        report.rows[i] = inst;
    });

    for (const RemarkInstance& inst : report.rows) {
        if (inst.exhausted) {
            ++report.exhausted_skipped;
            continue;
        }
        if (inst.violates_max) {
            ++report.max_violations;
            report.violation_indices.push_back(inst.index);
        }
        if (inst.exceeds_min) ++report.min_exceed_count;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Basin of attraction on the 2-D example
// ---------------------------------------------------------------------------

struct BasinRow {
    long index = 0;
    Vector z0;
    double alpha = 0, beta = 0, delta0 = 0;
    VerdictKind verdict = VerdictKind::MaxIterations;
    long iterations = 0;
    Vector final_point;
    double final_grad_norm = 0;
    CriticalKind cls = CriticalKind::Degenerate;  // meaningful for CriticalPoint verdicts
};

struct BasinOptions {
    MethodTag method = MethodTag::CoordinatewiseGdNew;
    long samples = 1000;
    double init_lo = -1.0, init_hi = 1.0;  // square init box per coordinate
    bool randomize_params = true;          // +-10% around the base triple
    double alpha = 0.5, beta = 0.5, delta0 = 1.0;
    StoppingRule stop;
    double shrink = 0.5;
    double l_floor = 0.0;  // 0 = no floor
    std::uint64_t seed = 0;
};

struct BasinReport {
    long samples = 0;
    long critical = 0, diverged = 0, max_iterations = 0, breakdown = 0;
    long local_minimum = 0, origin = 0, generalized_saddle = 0, degenerate = 0;
    std::vector<BasinRow> rows;
};

namespace detail {

inline SmoothnessModel basin_block_model(const BasinOptions& opt) {
    SmoothnessModel m = example_smoothness_model(opt.shrink);
    if (opt.l_floor > 0.0) m = with_lipschitz_floor(m, opt.l_floor);
    return m;
}

inline Trajectory basin_run(const BasinOptions& opt, const Vector& z0,
                            const LineSearchParams& params) {
    SeparableObjective f = make_example_separable();
    switch (opt.method) {
        case MethodTag::StandardGd:
            return run_standard_gd(f.combined(), z0, params.delta0, opt.stop);
        case MethodTag::BacktrackingGd:
            return run_backtracking_gd(f.combined(), z0, params, opt.stop);
        case MethodTag::TwoWayBacktrackingGd:
            return run_two_way_backtracking_gd(f.combined(), z0, params, opt.stop);
        case MethodTag::CoordinatewiseBacktrackingGd:
            return run_coordinatewise_backtracking_gd(f, z0, params, opt.stop);
        case MethodTag::CoordinatewiseTwoWayGd:
            return run_coordinatewise_two_way_gd(f, z0, params, opt.stop);
        case MethodTag::CoordinatewiseGdNew: {
            SmoothnessModel m = basin_block_model(opt);
            return run_coordinatewise_gdnew(f, z0, params, {m, m}, opt.stop);
        }
        case MethodTag::FullSpaceGdNew: {
            SmoothnessModel m = example_smoothness_model_2d(opt.shrink);
            if (opt.l_floor > 0.0) m = with_lipschitz_floor(m, opt.l_floor);
            return run_gdnew(f.combined(), z0, params, m, opt.stop);
        }
    }
    throw std::logic_error("unreachable");
}

inline LineSearchParams basin_params(const BasinOptions& opt, Rng& rng) {
    double a = opt.alpha, b = opt.beta, d0 = opt.delta0;
    if (opt.randomize_params) {
        a *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
        b *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
        d0 *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
        a = std::clamp(a, 1e-6, 1.0 - 1e-6);
        b = std::clamp(b, 1e-6, 1.0 - 1e-6);
    }
    return LineSearchParams(a, b, d0);
}

inline Vector basin_initial_point(const BasinOptions& opt, Rng& rng) {
    Vector z0(2);
    for (double& c : z0) {
        do {
            c = rng.uniform(opt.init_lo, opt.init_hi);
        } while (std::fabs(c) < 1e-12);  // the axes are excluded (measure zero)
    }
    return z0;
}

}  // namespace detail

/// Draws initial points from the init box, optionally perturbs the params,
/// runs the chosen method on g(x)+g(y), and classifies every limit.
inline BasinReport convergence_basin_experiment(const BasinOptions& opt) {
    if (opt.samples < 1) throw std::invalid_argument("samples must be >= 1");
    BasinReport report;
    report.samples = opt.samples;
    report.rows.resize(opt.samples);

    parallel_for(opt.samples, [&](long i) {
        Rng rng(opt.seed, static_cast<std::uint64_t>(i));
        BasinRow row;
        row.index = i;
        row.z0 = detail::basin_initial_point(opt, rng);
        LineSearchParams params = detail::basin_params(opt, rng);
        row.alpha = params.alpha;
        row.beta = params.beta;
        row.delta0 = params.delta0;

        Trajectory traj = detail::basin_run(opt, row.z0, params);
        row.verdict = traj.verdict.kind;
        row.iterations = static_cast<long>(traj.records.size()) - 1;
        row.final_point = traj.final_record().z;
        row.final_grad_norm = traj.final_record().grad_norm;
        if (row.verdict == VerdictKind::CriticalPoint)
            row.cls = classify_example_g2d_point(*traj.verdict.limit_point).kind;
        report.rows[i] = row;
    });

    for (const BasinRow& row : report.rows) {
        switch (row.verdict) {
            case VerdictKind::CriticalPoint:
                ++report.critical;
                switch (row.cls) {
                    case CriticalKind::LocalMinimum: ++report.local_minimum; break;
                    case CriticalKind::Origin: ++report.origin; break;
                    case CriticalKind::GeneralizedSaddle: ++report.generalized_saddle; break;
                    case CriticalKind::Degenerate: ++report.degenerate; break;
                }
                break;
            case VerdictKind::DivergedToInfinity: ++report.diverged; break;
            case VerdictKind::MaxIterations: ++report.max_iterations; break;
            case VerdictKind::NumericalBreakdown: ++report.breakdown; break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Full-space dichotomy on the 2-D example
// ---------------------------------------------------------------------------

enum class DichotomyCase { OffAxisCritical, AxisCluster, Anomaly };

inline const char* to_string(DichotomyCase c) {
    switch (c) {
        case DichotomyCase::OffAxisCritical: return "off-axis-critical";
        case DichotomyCase::AxisCluster: return "axis-cluster";
        case DichotomyCase::Anomaly: return "anomaly";
    }
    return "?";
}

struct Claim6Row {
    long index = 0;
    Vector z0;
    DichotomyCase outcome = DichotomyCase::Anomaly;
    VerdictKind verdict = VerdictKind::MaxIterations;
    long iterations = 0;
    Vector final_point;
    double final_grad_norm = 0;
};

struct Claim6Options {
    long samples = 1000;
    double init_lo = -1.0, init_hi = 1.0;
    double alpha = 0.5, beta = 0.5, delta0 = 1.0;
    double shrink = 0.5;
    StoppingRule stop;
    std::uint64_t seed = 0;
    // Finite proxies.
    double axis_tolerance = 1e-3;       // "within tolerance of an axis"
    double late_fraction = 0.05;        // cluster window: last 5% of iterates
    double case1_gradient_tol = 1e-3;   // converging-to-off-axis-critical proxy
    double case1_step_tol = 1e-4;       // steps must have vanished
};

struct Claim6Report {
    long samples = 0;
    long case1 = 0, case2 = 0, anomalies = 0;
    std::vector<Claim6Row> rows;
    std::vector<long> anomaly_indices;
};

namespace detail {

inline DichotomyCase classify_dichotomy(const Trajectory& traj, const Claim6Options& opt) {
    const auto& recs = traj.records;
    std::size_t window = std::max<std::size_t>(2, static_cast<std::size_t>(
                                                      opt.late_fraction * recs.size()));
    window = std::min(window, recs.size());
    std::size_t first = recs.size() - window;

    double max_late_step = 0.0;
    for (std::size_t i = first; i < recs.size(); ++i)
        if (recs[i].step_norm) max_late_step = std::max(max_late_step, *recs[i].step_norm);

    const Vector& zf = recs.back().z;
    double min_coord = std::min(std::fabs(zf[0]), std::fabs(zf[1]));

    // Case 1: limit is a critical point off the axes.
    bool converged = traj.verdict.kind == VerdictKind::CriticalPoint ||
                     (recs.back().grad_norm <= opt.case1_gradient_tol &&
                      max_late_step <= opt.case1_step_tol);
    if (min_coord >= opt.axis_tolerance && converged) return DichotomyCase::OffAxisCritical;

    // Case 2: every late cluster point within tolerance of one axis, with the
    // axis projections spanning a gap-free interval (gap <= max late step).
    bool all_near_x0 = true, all_near_y0 = true;
    for (std::size_t i = first; i < recs.size(); ++i) {
        if (std::fabs(recs[i].z[0]) > opt.axis_tolerance) all_near_x0 = false;
        if (std::fabs(recs[i].z[1]) > opt.axis_tolerance) all_near_y0 = false;
    }
    if (!all_near_x0 && !all_near_y0) return DichotomyCase::Anomaly;

    std::vector<double> proj;
    proj.reserve(window);
    for (std::size_t i = first; i < recs.size(); ++i)
        proj.push_back(all_near_x0 ? recs[i].z[1] : recs[i].z[0]);
    std::sort(proj.begin(), proj.end());
    double gap_allowance = std::max(max_late_step, 1e-9);
    for (std::size_t i = 1; i < proj.size(); ++i)
        if (proj[i] - proj[i - 1] > gap_allowance) return DichotomyCase::Anomaly;
    return DichotomyCase::AxisCluster;
}

}  // namespace detail

/// Full-space GD-New on g(x)+g(y): each trajectory must either converge to an
/// off-axis critical point or cluster along an axis.
inline Claim6Report claim6_dichotomy_check(const Claim6Options& opt) {
    if (opt.samples < 1) throw std::invalid_argument("samples must be >= 1");
    Claim6Report report;
    report.samples = opt.samples;
    report.rows.resize(opt.samples);

    SeparableObjective f = make_example_separable();
    DifferentiableFunction full = f.combined();
    SmoothnessModel model = example_smoothness_model_2d(opt.shrink);
    LineSearchParams params(opt.alpha, opt.beta, opt.delta0);

    parallel_for(opt.samples, [&](long i) {
        Rng rng(opt.seed, static_cast<std::uint64_t>(i));
        Claim6Row row;
        row.index = i;
        Vector z0(2);
        for (double& c : z0) {
            do {
                c = rng.uniform(opt.init_lo, opt.init_hi);
            } while (std::fabs(c) < 1e-12);
        }
        row.z0 = z0;
        Trajectory traj = run_gdnew(full, z0, params, model, opt.stop);
        row.verdict = traj.verdict.kind;
        row.iterations = static_cast<long>(traj.records.size()) - 1;
        row.final_point = traj.final_record().z;
        row.final_grad_norm = traj.final_record().grad_norm;
        row.outcome = detail::classify_dichotomy(traj, opt);
        report.rows[i] = row;
    });

    for (const Claim6Row& row : report.rows) {
        switch (row.outcome) {
            case DichotomyCase::OffAxisCritical: ++report.case1; break;
            case DichotomyCase::AxisCluster: ++report.case2; break;
            case DichotomyCase::Anomaly:
                ++report.anomalies;
                report.anomaly_indices.push_back(row.index);
                break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Line-search property suite (randomized invariant checks)
// ---------------------------------------------------------------------------

struct PropertyCheck {
    std::string name;
    long checked = 0;
    long failures = 0;
    bool passed() const { return failures == 0; }
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool passed() const {
        for (const PropertyCheck& c : checks)
            if (!c.passed()) return false;
        return true;
    }
};

/// Randomized instances probing the selection invariants: ladder membership,
/// maximality, two-way consistency, the GD-New caps, and coordinate-wise
/// Armijo satisfaction.
inline PropertyReport line_search_property_suite(long instance_count, std::uint64_t seed) {
    PropertyCheck membership{"ladder-membership"};
    PropertyCheck maximality{"armijo-maximality"};
    PropertyCheck two_way{"two-way-consistency"};
    PropertyCheck caps{"gdnew-caps"};
    PropertyCheck cw_armijo{"coordinatewise-armijo-satisfied"};

    for (long i = 0; i < instance_count; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        int m1 = rng.uniform_int(1, 4);
        int m2 = rng.uniform_int(1, 4);
        auto draw = [&](int m) {
            Vector c(m);
            for (double& v : c) v = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
            return c;
        };
        SeparableObjective f{make_diag_quadratic(draw(m1)), make_diag_quadratic(draw(m2))};
        DifferentiableFunction full = f.combined();
        Vector z(f.dimension());
        for (double& v : z) v = rng.uniform(-2.0, 2.0);
        LineSearchParams params(rng.uniform(0.05, 0.95), rng.uniform(0.1, 0.9),
                                rng.uniform(0.5, 4.0));
        detail::BetaLadder ladder(params.beta, params.delta0);

        DeltaSelection sel = backtracking_delta(full, z, params);
        if (!sel.exhausted) {
            ++membership.checked;
            if (sel.delta != ladder.value(sel.candidates_tested - 1)) ++membership.failures;
            ++maximality.checked;
            if (!armijo_holds(full, z, sel.delta, params.alpha)) ++maximality.failures;
            if (sel.ladder_index > 0 &&
                armijo_holds(full, z, ladder.value(sel.ladder_index - 1), params.alpha))
                ++maximality.failures;
            ++two_way.checked;
            DeltaSelection tw = two_way_backtracking_delta(full, z, params.delta0, params);
            if (tw.delta != sel.delta) ++two_way.failures;
        }

        double gnorm = norm(grad(full, z));
        double r = rng.uniform(0.01, 2.0);
        double l = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
        DeltaSelection gd = gdnew_delta(gnorm, r, l, params);
        if (!gd.exhausted) {
            ++caps.checked;
            bool ok = gd.delta < params.alpha / l && gd.delta * gnorm < r;
            double above = gd.ladder_index > 0 ? ladder.value(gd.ladder_index - 1)
                                               : params.delta0 / params.beta;
            bool tight = gd.ladder_index == 0 ||
                         !(above < params.alpha / l && above * gnorm < r);
            if (!ok || !tight) ++caps.failures;
        }

        auto [s1, s2] = coordinatewise_deltas(f, z, SelectionMethod::PlainBacktracking, params);
        if (!s1.exhausted && !s2.exhausted) {
            ++cw_armijo.checked;
            if (!coordinatewise_armijo_holds(f, f.split1(z), f.split2(z), s1.delta, s2.delta,
                                             params.alpha))
                ++cw_armijo.failures;
        }
    }

    return PropertyReport{{membership, maximality, two_way, caps, cw_armijo}};
}

}  // namespace cwgd
