#pragma once

#include <chrono>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwgd/analysis.hpp"
#include "cwgd/config.hpp"
#include "cwgd/experiments.hpp"
#include "cwgd/io.hpp"
#include "cwgd/optimize.hpp"

/// \file runner.hpp
///
/// Dispatch from a validated ExperimentConfig to the matching optimizer or
/// experiment, with serialization of trajectories, summaries, and the run
/// manifest.

namespace cwgd {

struct RunResult {
    RunManifest manifest;
    int exit_code = 0;
    std::vector<std::string> console_lines;
};

namespace detail {

struct BuiltObjective {
    DifferentiableFunction full;
    std::optional<SeparableObjective> separable;
    std::optional<std::pair<SmoothnessModel, SmoothnessModel>> block_models;
    std::optional<SmoothnessModel> full_model;
};

inline BuiltObjective build_objective(const ExperimentConfig& cfg) {
    BuiltObjective out;
    switch (cfg.objective) {
        case ObjectiveTag::Quadratic: {
            int d = static_cast<int>(cfg.z0.size());
            out.full = make_quadratic(cfg.lambda, d);
            if (d >= 2) {
                int m1 = d / 2;
                out.separable = SeparableObjective{make_quadratic(cfg.lambda, m1),
                                                   make_quadratic(cfg.lambda, d - m1)};
            }
            SmoothnessModel m{[](const Vector&) { return 1.0; },
                              [lam = cfg.lambda](const Vector&) { return lam; }};
            out.block_models = {m, m};
            out.full_model = m;
            break;
        }
        case ObjectiveTag::IllQuadratic: {
            if (cfg.coeffs.size() != cfg.z0.size())
                throw std::invalid_argument("z0 length must match coeffs length");
            int d = static_cast<int>(cfg.coeffs.size());
            out.full = make_diag_quadratic(cfg.coeffs);
            if (d >= 2) {
                int m1 = d / 2;
                Vector c1(cfg.coeffs.begin(), cfg.coeffs.begin() + m1);
                Vector c2(cfg.coeffs.begin() + m1, cfg.coeffs.end());
                out.separable = SeparableObjective{make_diag_quadratic(c1), make_diag_quadratic(c2)};
                auto lip = [](const Vector& c) {
                    double l = 0;
                    for (double v : c) l = std::max(l, v);
                    return l;
                };
                SmoothnessModel m1m{[](const Vector&) { return 1.0; },
                                    [l = lip(c1)](const Vector&) { return l; }};
                SmoothnessModel m2m{[](const Vector&) { return 1.0; },
                                    [l = lip(c2)](const Vector&) { return l; }};
                out.block_models = {m1m, m2m};
            }
            double lmax = 0;
            for (double v : cfg.coeffs) lmax = std::max(lmax, v);
            out.full_model = SmoothnessModel{[](const Vector&) { return 1.0; },
                                             [lmax](const Vector&) { return lmax; }};
            break;
        }
        case ObjectiveTag::ExampleG: {
            out.full = make_example_g();
            SmoothnessModel m = example_smoothness_model(cfg.shrink);
            if (cfg.l_floor > 0.0) m = with_lipschitz_floor(m, cfg.l_floor);
            out.full_model = m;
            break;
        }
        case ObjectiveTag::ExampleG2d: {
            out.separable = make_example_separable();
            out.full = out.separable->combined();
            SmoothnessModel m = example_smoothness_model(cfg.shrink);
            if (cfg.l_floor > 0.0) m = with_lipschitz_floor(m, cfg.l_floor);
            out.block_models = {m, m};
            SmoothnessModel m2 = example_smoothness_model_2d(cfg.shrink);
            if (cfg.l_floor > 0.0) m2 = with_lipschitz_floor(m2, cfg.l_floor);
            out.full_model = m2;
            break;
        }
    }
    return out;
}

inline Trajectory run_single(const ExperimentConfig& cfg, const BuiltObjective& obj,
                             const Vector& z0, const LineSearchParams& params) {
    switch (cfg.method) {
        case MethodTag::StandardGd:
            return run_standard_gd(obj.full, z0, cfg.delta0, cfg.stop);
        case MethodTag::BacktrackingGd:
            return run_backtracking_gd(obj.full, z0, params, cfg.stop);
        case MethodTag::TwoWayBacktrackingGd:
            return run_two_way_backtracking_gd(obj.full, z0, params, cfg.stop);
        case MethodTag::CoordinatewiseBacktrackingGd:
            if (!obj.separable)
                throw std::invalid_argument("coordinate-wise method needs a separable objective");
            return run_coordinatewise_backtracking_gd(*obj.separable, z0, params, cfg.stop);
        case MethodTag::CoordinatewiseTwoWayGd:
            if (!obj.separable)
                throw std::invalid_argument("coordinate-wise method needs a separable objective");
            return run_coordinatewise_two_way_gd(*obj.separable, z0, params, cfg.stop);
        case MethodTag::CoordinatewiseGdNew:
            if (!obj.separable || !obj.block_models)
                throw std::invalid_argument(
                    "coordinatewise-gdnew needs a separable objective with smoothness models");
            return run_coordinatewise_gdnew(*obj.separable, z0, params, *obj.block_models,
                                            cfg.stop);
        case MethodTag::FullSpaceGdNew:
            if (!obj.full_model)
                throw std::invalid_argument("gdnew-full needs a smoothness model");
            return run_gdnew(obj.full, z0, params, *obj.full_model, cfg.stop);
    }
    throw std::logic_error("unreachable");
}

inline void emit_trajectory(const ExperimentConfig& cfg, const Trajectory& traj,
                            const std::filesystem::path& base, RunManifest& manifest) {
    if (cfg.format == OutputFormat::Csv) {
        auto path = base;
        path += ".csv";
        std::ofstream os = open_output(path);
        write_trajectory_csv(os, traj, cfg.thinning_stride);
        manifest.output_files.push_back(path.string());
    } else {
        auto path = base;
        path += ".jsonl";
        std::vector<json> lines;
        for (const IterateRecord& r : traj.records) {
            json j{{"n", r.n}, {"z", r.z}, {"f", r.value}, {"grad_norm", r.grad_norm}};
            if (r.delta1) j["delta1"] = *r.delta1;
            if (r.delta2) j["delta2"] = *r.delta2;
            if (r.step_norm) j["step_norm"] = *r.step_norm;
            lines.push_back(j);
        }
        write_json_lines(path, lines);
        manifest.output_files.push_back(path.string());
    }
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    auto start = std::chrono::steady_clock::now();

    RunResult result;
    result.manifest.config_echo = serialize_config(cfg);
    fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir);

    std::vector<json> summary;
    LineSearchParams params = cfg.line_search_params();

    switch (cfg.kind) {
        case ExperimentKind::Single: {
            detail::BuiltObjective obj = detail::build_objective(cfg);
            Trajectory traj = detail::run_single(cfg, obj, cfg.z0, params);
            detail::emit_trajectory(cfg, traj, out_dir / "trajectory", result.manifest);
            summary.push_back(trajectory_summary(traj));
            result.console_lines.push_back(std::string("verdict: ") +
                                           to_string(traj.verdict.kind));
            break;
        }
        case ExperimentKind::Sweep: {
            detail::BuiltObjective obj = detail::build_objective(cfg);
            int d = obj.full.dimension;
            for (long i = 0; i < cfg.sample_count; ++i) {
                Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
                Vector z0(d);
                for (double& c : z0) c = rng.uniform(cfg.init_lo, cfg.init_hi);
                Trajectory traj = detail::run_single(cfg, obj, z0, params);
                char name[32];
                std::snprintf(name, sizeof(name), "traj_%04ld", i);
                detail::emit_trajectory(cfg, traj, out_dir / name, result.manifest);
                json j = trajectory_summary(traj);
                j["index"] = i;
                j["z0"] = z0;
                summary.push_back(j);
            }
            break;
        }
        case ExperimentKind::Remark: {
            RemarkReport report = remark_inequality_experiment(cfg.sample_count, cfg.seed);
            auto path = out_dir / "remark.csv";
            std::ofstream os = open_output(path);
            write_remark_csv(os, report);
            result.manifest.output_files.push_back(path.string());
            summary.push_back(remark_summary(report));
            result.console_lines.push_back(
                "max-inequality violations: " + std::to_string(report.max_violations) +
                ", delta(x,y) > min frequency: " + std::to_string(report.min_exceed_frequency()));
            if (!report.passed()) result.exit_code = 1;
            break;
        }
        case ExperimentKind::Basin: {
            BasinOptions opt;
            opt.method = cfg.method;
            opt.samples = cfg.sample_count;
            opt.init_lo = cfg.init_lo;
            opt.init_hi = cfg.init_hi;
            opt.randomize_params = cfg.randomize_params;
            opt.alpha = cfg.alpha;
            opt.beta = cfg.beta;
            opt.delta0 = cfg.delta0;
            opt.stop = cfg.stop;
            opt.shrink = cfg.shrink;
            opt.l_floor = cfg.l_floor;
            opt.seed = cfg.seed;
            BasinReport report = convergence_basin_experiment(opt);
            auto path = out_dir / "basin.csv";
            std::ofstream os = open_output(path);
            write_basin_csv(os, report);
            result.manifest.output_files.push_back(path.string());
            summary.push_back(basin_summary(report));
            result.console_lines.push_back(
                "critical: " + std::to_string(report.critical) + "/" +
                std::to_string(report.samples) +
                " (minima " + std::to_string(report.local_minimum) + ", origin " +
                std::to_string(report.origin) + ", saddle " +
                std::to_string(report.generalized_saddle) + ", degenerate " +
                std::to_string(report.degenerate) + ")");
            break;
        }
        case ExperimentKind::Claim6: {
            Claim6Options opt;
            opt.samples = cfg.sample_count;
            opt.init_lo = cfg.init_lo;
            opt.init_hi = cfg.init_hi;
            opt.alpha = cfg.alpha;
            opt.beta = cfg.beta;
            opt.delta0 = cfg.delta0;
            opt.shrink = cfg.shrink;
            opt.stop = cfg.stop;
            opt.seed = cfg.seed;
            Claim6Report report = claim6_dichotomy_check(opt);
            auto path = out_dir / "claim6.csv";
            std::ofstream os = open_output(path);
            write_claim6_csv(os, report);
            result.manifest.output_files.push_back(path.string());
            summary.push_back(claim6_summary(report));
            result.console_lines.push_back("off-axis-critical: " + std::to_string(report.case1) +
                                           ", axis-cluster: " + std::to_string(report.case2) +
                                           ", anomalies: " + std::to_string(report.anomalies));
            if (report.anomalies > 0) result.exit_code = 1;
            break;
        }
        case ExperimentKind::Invariants: {
            RemarkReport remark = remark_inequality_experiment(cfg.sample_count, cfg.seed);
            PropertyReport props = line_search_property_suite(cfg.sample_count, cfg.seed + 1);
            summary.push_back(remark_summary(remark));
            result.console_lines.push_back(
                std::string(remark.passed() ? "PASS" : "FAIL") +
                " remark-max-inequality (violations: " + std::to_string(remark.max_violations) +
                ")");
            for (const PropertyCheck& c : props.checks) {
                summary.push_back(json{{"experiment", "invariants"},
                                       {"property", c.name},
                                       {"checked", c.checked},
                                       {"failures", c.failures},
                                       {"passed", c.passed()}});
                result.console_lines.push_back(std::string(c.passed() ? "PASS" : "FAIL") + " " +
                                               c.name + " (" + std::to_string(c.failures) + "/" +
                                               std::to_string(c.checked) + " failures)");
            }
            if (!remark.passed() || !props.passed()) result.exit_code = 1;
            break;
        }
    }

    auto summary_path = out_dir / "summary.jsonl";
    write_json_lines(summary_path, summary);
    result.manifest.output_files.push_back(summary_path.string());

    result.manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto manifest_path = out_dir / "manifest.json";
    {
        std::ofstream os = open_output(manifest_path);
        os << result.manifest.to_json().dump(2) << "\n";
    }
    return result;
}

}  // namespace cwgd
