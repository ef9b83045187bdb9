#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cwgd/experiments.hpp"
#include "cwgd/line_search.hpp"

using namespace cwgd;
using Catch::Approx;

TEST_CASE("params are validated at construction") {
    CHECK_THROWS_AS(LineSearchParams(1.5, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LineSearchParams(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LineSearchParams(0.5, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("armijo on quadratics matches the closed form") {
    // f = lambda/2 |z|^2: holds iff delta <= 2(1-alpha)/lambda
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        double lambda = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
        double alpha = rng.uniform(0.05, 0.95);
        double delta = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        double threshold = 2.0 * (1.0 - alpha) / lambda;
        if (std::fabs(delta - threshold) < 1e-9 * threshold) continue;  // skip knife edges
        auto f = make_quadratic(lambda, 2);
        CHECK(armijo_holds(f, Vector{1.0, -0.5}, delta, alpha) == (delta < threshold));
    }
}

TEST_CASE("armijo boundary equality counts as satisfied") {
    auto f = make_quadratic(1.0, 2);
    CHECK(armijo_holds(f, Vector{1.0, 0.0}, 1.0, 0.5));  // 2(1-alpha)/lambda = 1 exactly
}

TEST_CASE("armijo holds for every delta at a critical point") {
    auto f = make_quadratic(1.0, 2);
    CHECK(armijo_holds(f, Vector{0.0, 0.0}, 123.0, 0.9));
}

TEST_CASE("non-finite trial values fail the condition") {
    DifferentiableFunction f{1, [](const Vector& z) { return std::exp(z[0]); },
                             [](const Vector& z) { return Vector{std::exp(z[0])}; }};
    // A huge step overflows exp; backtracking must treat that as failure.
    CHECK_FALSE(armijo_holds(f, Vector{700.0}, 1.0, 0.5));
}

TEST_CASE("coordinatewise armijo") {
    SeparableObjective f{make_quadratic(1.0, 1), make_quadratic(1.0, 1)};
    SECTION("equal deltas coincide with the full condition") {
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            double d = std::exp(rng.uniform(std::log(0.01), std::log(5.0)));
            double a = rng.uniform(0.1, 0.9);
            Vector x{rng.uniform(-2.0, 2.0)}, y{rng.uniform(-2.0, 2.0)};
            CHECK(coordinatewise_armijo_holds(f, x, y, d, d, a) ==
                  armijo_holds(f.combined(), Vector{x[0], y[0]}, d, a));
        }
    }
    SECTION("per-block satisfaction implies the summed condition") {
        double a = 0.5;
        // deltas accepted per block
        CHECK(armijo_holds(f.block1, Vector{1.0}, 1.0, a));
        CHECK(armijo_holds(f.block2, Vector{1.0}, 0.5, a));
        CHECK(coordinatewise_armijo_holds(f, {1.0}, {1.0}, 1.0, 0.5, a));
    }
    SECTION("unbalanced deltas can fail") {
        CHECK_FALSE(coordinatewise_armijo_holds(f, {1.0}, {1.0}, 1.0, 3.0, 0.5));
    }
    SECTION("deltas must be positive") {
        CHECK_THROWS_AS(coordinatewise_armijo_holds(f, {1.0}, {1.0}, 0.0, 1.0, 0.5),
                        std::invalid_argument);
    }
}

TEST_CASE("backtracking selects the largest qualifying ladder member") {
    LineSearchParams params(0.5, 0.5, 2.0);
    auto f = make_quadratic(1.0, 2);
    DeltaSelection sel = backtracking_delta(f, Vector{1.0, 0.0}, params);
    CHECK(sel.delta == 1.0);
    CHECK(sel.candidates_tested == 2);
    CHECK_FALSE(sel.exhausted);

    auto stiff = make_quadratic(100.0, 1);
    DeltaSelection sel2 = backtracking_delta(stiff, Vector{1.0}, LineSearchParams(0.5, 0.5, 1.0));
    CHECK(sel2.delta == 1.0 / 128.0);
    CHECK(sel2.candidates_tested == 8);
}

TEST_CASE("backtracking at a critical point returns delta0 immediately") {
    auto f = make_quadratic(1.0, 1);
    DeltaSelection sel = backtracking_delta(f, Vector{0.0}, LineSearchParams(0.5, 0.5, 2.0));
    CHECK(sel.delta == 2.0);
    CHECK(sel.candidates_tested == 1);
}

TEST_CASE("backtracking flags exhaustion instead of looping") {
    auto stiff = make_quadratic(100.0, 1);
    DeltaSelection sel = backtracking_delta(stiff, Vector{1.0}, LineSearchParams(0.5, 0.5, 1.0), 3);
    CHECK(sel.exhausted);
    CHECK(sel.candidates_tested == 3);
}

TEST_CASE("two-way search") {
    LineSearchParams params(0.5, 0.5, 2.0);
    auto f = make_quadratic(1.0, 2);
    SECTION("ascends from a conservative previous delta") {
        DeltaSelection sel = two_way_backtracking_delta(f, Vector{1.0, 0.0}, 0.25, params);
        CHECK(sel.delta == 1.0);
    }
    SECTION("the accepted delta is a fixed point") {
        DeltaSelection sel = two_way_backtracking_delta(f, Vector{1.0, 0.0}, 1.0, params);
        CHECK(sel.delta == 1.0);
    }
    SECTION("descends when the previous delta is too large") {
        auto stiff = make_quadratic(100.0, 1);
        DeltaSelection sel =
            two_way_backtracking_delta(stiff, Vector{1.0}, 1.0, LineSearchParams(0.5, 0.5, 1.0));
        CHECK(sel.delta == 1.0 / 128.0);
    }
    SECTION("starting at delta0 reproduces plain backtracking") {
        Rng rng(17);
        for (int i = 0; i < 100; ++i) {
            double lambda = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
            auto q = make_quadratic(lambda, 1);
            LineSearchParams p(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9),
                               rng.uniform(0.5, 4.0));
            Vector z{rng.uniform(0.1, 2.0)};
            DeltaSelection plain = backtracking_delta(q, z, p);
            DeltaSelection tw = two_way_backtracking_delta(q, z, p.delta0, p);
            if (!plain.exhausted) CHECK(tw.delta == plain.delta);
        }
    }
    SECTION("result never exceeds delta0") {
        DeltaSelection sel = two_way_backtracking_delta(f, Vector{0.0, 0.0}, 0.5, params);
        CHECK(sel.delta <= params.delta0);
    }
    SECTION("previous delta outside (0, delta0] is rejected") {
        CHECK_THROWS_AS(two_way_backtracking_delta(f, Vector{1.0, 0.0}, 3.0, params),
                        std::invalid_argument);
    }
}

TEST_CASE("gdnew ladder selection under the two caps") {
    LineSearchParams params(0.5, 0.5, 1.0);
    SECTION("alpha/L cap binding") {
        DeltaSelection sel = gdnew_delta(1.0, 1.0, 10.0, params);
        CHECK(sel.delta == 1.0 / 32.0);  // largest 2^-n < 0.05
        CHECK_FALSE(sel.exhausted);
    }
    SECTION("radius cap binding") {
        DeltaSelection sel = gdnew_delta(10.0, 0.5, 0.4, params);
        CHECK(sel.delta == 1.0 / 32.0);  // delta*10 < 0.5
    }
    SECTION("zero gradient leaves only the alpha/L cap") {
        DeltaSelection sel = gdnew_delta(0.0, 1.0, 10.0, params);
        CHECK(sel.delta == 1.0 / 32.0);
    }
    SECTION("strictness: a tie with alpha/L is rejected") {
        // alpha/L = 0.5 exactly; delta = 0.5 must be refused, 0.25 accepted.
        DeltaSelection sel = gdnew_delta(0.0, 1.0, 1.0, params);
        CHECK(sel.delta == 0.25);
    }
    SECTION("invalid model values are rejected") {
        CHECK_THROWS_AS(gdnew_delta(1.0, 0.0, 1.0, params), std::invalid_argument);
    }
}

TEST_CASE("coordinatewise deltas") {
    LineSearchParams params(0.5, 0.5, 2.0);
    SECTION("per-block thresholds are independent") {
        SeparableObjective f{make_quadratic(1.0, 1), make_quadratic(100.0, 1)};
        auto [s1, s2] = coordinatewise_deltas(f, {1.0, 1.0}, SelectionMethod::PlainBacktracking,
                                              params);
        CHECK(s1.delta == 1.0);
        CHECK(s2.delta == 1.0 / 128.0);
    }
    SECTION("symmetry") {
        SeparableObjective f = make_example_separable();
        auto [s1, s2] =
            coordinatewise_deltas(f, {0.4, 0.4}, SelectionMethod::PlainBacktracking, params);
        CHECK(s1.delta == s2.delta);
        CHECK(s1.candidates_tested == s2.candidates_tested);
    }
    SECTION("a critical block gets delta0") {
        SeparableObjective f{make_quadratic(1.0, 1), make_quadratic(100.0, 1)};
        auto [s1, s2] =
            coordinatewise_deltas(f, {0.0, 1.0}, SelectionMethod::PlainBacktracking, params);
        CHECK(s1.delta == 2.0);
        CHECK(s1.candidates_tested == 1);
        CHECK(s2.delta == 1.0 / 128.0);
    }
    SECTION("gdnew without models is a configuration error") {
        SeparableObjective f{make_quadratic(1.0, 1), make_quadratic(1.0, 1)};
        CHECK_THROWS_AS(coordinatewise_deltas(f, {1.0, 1.0}, SelectionMethod::GdNew, params),
                        std::invalid_argument);
    }
}

TEST_CASE("randomized selection invariants") {
    PropertyReport report = line_search_property_suite(300, 123);
    for (const PropertyCheck& c : report.checks) {
        INFO(c.name << ": " << c.failures << "/" << c.checked);
        CHECK(c.passed());
        CHECK(c.checked > 0);
    }
}

TEST_CASE("remark inequality on random separable instances") {
    RemarkReport report = remark_inequality_experiment(1000, 42);
    CHECK(report.max_violations == 0);
    // delta(x,y) never exceeds max, but exceeding min is common
    CHECK(report.min_exceed_count >= 0);
}
