#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cwgd/experiments.hpp"

using namespace cwgd;
using Catch::Approx;

TEST_CASE("rng streams are reproducible and index-separated") {
    Rng a(99, 0), b(99, 0), c(99, 1);
    double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    CHECK(va == vb);
    CHECK(va != vc);
    Rng d(7);
    for (int i = 0; i < 1000; ++i) {
        double u = d.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
    }
}

TEST_CASE("parallel_for touches every index exactly once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, [&](long i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("remark experiment never sees a max violation") {
    RemarkReport report = remark_inequality_experiment(500, 7);
    CHECK(report.instances == 500);
    CHECK(report.max_violations == 0);
    CHECK(report.violation_indices.empty());
    CHECK(report.passed());
    CHECK(report.min_exceed_frequency() >= 0.0);
    CHECK(report.min_exceed_frequency() <= 1.0);
}

TEST_CASE("remark reports are deterministic in the seed") {
    RemarkReport a = remark_inequality_experiment(200, 11);
    RemarkReport b = remark_inequality_experiment(200, 11);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].delta_full == b.rows[i].delta_full);
        CHECK(a.rows[i].delta1 == b.rows[i].delta1);
        CHECK(a.rows[i].delta2 == b.rows[i].delta2);
    }
    CHECK(a.min_exceed_count == b.min_exceed_count);
}

TEST_CASE("a hand-built instance where the full delta exceeds the min") {
    // block1 flat, block2 stiff: delta1 = delta0, delta2 tiny.  The full-space
    // delta is driven by the stiff block but the flat block's slack lets it sit
    // strictly above min{delta1, delta2} when the point is unbalanced.
    SeparableObjective f{make_diag_quadratic({1.0}), make_diag_quadratic({100.0})};
    LineSearchParams params(0.5, 0.5, 1.0);
    Vector z{1.0, 0.001};
    auto [s1, s2] = coordinatewise_deltas(f, z, SelectionMethod::PlainBacktracking, params);
    DeltaSelection full = backtracking_delta(f.combined(), z, params);
    CHECK(s1.delta == 1.0);
    CHECK(s2.delta == 1.0 / 128.0);
    CHECK(full.delta > std::min(s1.delta, s2.delta));
    CHECK(full.delta <= std::max(s1.delta, s2.delta));
}

TEST_CASE("basin experiment on a small sample") {
    BasinOptions opt;
    opt.samples = 50;
    opt.seed = 21;
    BasinReport report = convergence_basin_experiment(opt);
    CHECK(report.samples == 50);
    CHECK(report.critical + report.diverged + report.max_iterations + report.breakdown == 50);
    CHECK(report.local_minimum + report.origin + report.generalized_saddle + report.degenerate ==
          report.critical);
    CHECK(report.critical >= 45);  // nearly all runs settle
    for (const BasinRow& row : report.rows) {
        CHECK(row.z0.size() == 2);
        CHECK(row.delta0 > 0.0);
        if (row.verdict == VerdictKind::CriticalPoint) CHECK(row.final_grad_norm <= 1e-8);
    }
}

TEST_CASE("basin experiment is deterministic in the seed") {
    BasinOptions opt;
    opt.samples = 30;
    opt.seed = 33;
    BasinReport a = convergence_basin_experiment(opt);
    BasinReport b = convergence_basin_experiment(opt);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].z0 == b.rows[i].z0);
        CHECK(a.rows[i].final_point == b.rows[i].final_point);
        CHECK(a.rows[i].verdict == b.rows[i].verdict);
        CHECK(a.rows[i].cls == b.rows[i].cls);
    }
}

TEST_CASE("a saddle start is recognized as a saddle limit") {
    // One block at a local maximum of g, the other at a minimum: the gradient
    // is already below tolerance, and the limit has a negative curvature
    // direction.
    auto g = make_example_g();
    CriticalPointCatalog catalog = find_critical_points_1d(g, 0.05, 1.0, 10000);
    double t_min = 0.0, t_saddle = 0.0;
    for (const CatalogEntry& e : catalog) {
        if (e.cls.kind == CriticalKind::LocalMinimum && t_min == 0.0) t_min = e.location;
        if (e.cls.kind == CriticalKind::GeneralizedSaddle && t_saddle == 0.0)
            t_saddle = e.location;
    }
    REQUIRE(t_min != 0.0);
    REQUIRE(t_saddle != 0.0);

    SeparableObjective f = make_example_separable();
    Trajectory traj = run_coordinatewise_backtracking_gd(f, {t_saddle, t_min},
                                                         LineSearchParams(0.5, 0.5, 1.0),
                                                         StoppingRule{});
    REQUIRE(traj.verdict.kind == VerdictKind::CriticalPoint);
    CHECK(classify_example_g2d_point(*traj.verdict.limit_point).kind ==
          CriticalKind::GeneralizedSaddle);
}

TEST_CASE("standard gd with a huge rate leaves the basin") {
    BasinOptions opt;
    opt.method = MethodTag::StandardGd;
    opt.randomize_params = false;
    opt.delta0 = 10.0;
    opt.samples = 20;
    opt.seed = 5;
    opt.stop.max_iterations = 2000;
    BasinReport report = convergence_basin_experiment(opt);
    // the fixed large rate overshoots; most runs never certify a critical point
    CHECK(report.critical < report.samples);
}

TEST_CASE("claim6 dichotomy on a small sample") {
    Claim6Options opt;
    opt.samples = 50;
    opt.seed = 13;
    Claim6Report report = claim6_dichotomy_check(opt);
    CHECK(report.samples == 50);
    CHECK(report.case1 + report.case2 + report.anomalies == 50);
    CHECK(report.anomalies == 0);
    CHECK(report.anomaly_indices.empty());
    for (const Claim6Row& row : report.rows) {
        CHECK(row.z0.size() == 2);
        CHECK(row.final_point.size() == 2);
    }
}

TEST_CASE("claim6 reports are deterministic in the seed") {
    Claim6Options opt;
    opt.samples = 25;
    opt.seed = 77;
    Claim6Report a = claim6_dichotomy_check(opt);
    Claim6Report b = claim6_dichotomy_check(opt);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].z0 == b.rows[i].z0);
        CHECK(a.rows[i].final_point == b.rows[i].final_point);
        CHECK(a.rows[i].outcome == b.rows[i].outcome);
    }
}

TEST_CASE("property suite passes on a fresh seed") {
    PropertyReport report = line_search_property_suite(200, 2024);
    CHECK(report.passed());
    CHECK(report.checks.size() == 5);
}

TEST_CASE("sample counts are validated") {
    CHECK_THROWS_AS(remark_inequality_experiment(0, 1), std::invalid_argument);
    BasinOptions b;
    b.samples = 0;
    CHECK_THROWS_AS(convergence_basin_experiment(b), std::invalid_argument);
    Claim6Options c;
    c.samples = 0;
    CHECK_THROWS_AS(claim6_dichotomy_check(c), std::invalid_argument);
}
