#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwgd/config.hpp"
#include "cwgd/experiments.hpp"
#include "cwgd/optimize.hpp"

/// \file io.hpp
///
/// CSV and JSON-lines serialization for trajectories, experiment reports,
/// and the run manifest.  Numbers are written with 17 significant digits so
/// doubles round-trip exactly.

namespace cwgd {

using nlohmann::json;

inline std::string fmt(double v) { return detail::format_double(v); }

struct RunManifest {
    std::string config_echo;
    std::string tool_version = "cwgd 1.0.0";
    double wall_seconds = 0.0;
    std::vector<std::string> output_files;

    json to_json() const {
        return json{{"tool_version", tool_version},
                    {"wall_seconds", wall_seconds},
                    {"output_files", output_files},
                    {"config", config_echo}};
    }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Columns: n, z0..z{d-1}, f, grad_norm, delta1, delta2, step_norm.
/// delta2 stays empty for full-space methods; the final record has empty
/// delta/step cells.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, long stride = 1) {
    int d = static_cast<int>(traj.records.front().z.size());
    os << "n";
    for (int i = 0; i < d; ++i) os << ",z" << i;
    os << ",f,grad_norm,delta1,delta2,step_norm\n";
    const auto n_records = static_cast<long>(traj.records.size());
    for (long i = 0; i < n_records; ++i) {
        if (i % stride != 0 && i != n_records - 1) continue;
        const IterateRecord& r = traj.records[i];
        os << r.n;
        for (double c : r.z) os << "," << fmt(c);
        os << "," << fmt(r.value) << "," << fmt(r.grad_norm) << ",";
        if (r.delta1) os << fmt(*r.delta1);
        os << ",";
        if (r.delta2) os << fmt(*r.delta2);
        os << ",";
        if (r.step_norm) os << fmt(*r.step_norm);
        os << "\n";
    }
}

inline void write_basin_csv(std::ostream& os, const BasinReport& report) {
    os << "index,x0,y0,alpha,beta,delta0,verdict,iterations,xf,yf,final_grad_norm,class\n";
    for (const BasinRow& r : report.rows) {
        os << r.index << "," << fmt(r.z0[0]) << "," << fmt(r.z0[1]) << "," << fmt(r.alpha) << ","
           << fmt(r.beta) << "," << fmt(r.delta0) << "," << to_string(r.verdict) << ","
           << r.iterations << "," << fmt(r.final_point[0]) << "," << fmt(r.final_point[1]) << ","
           << fmt(r.final_grad_norm) << ","
           << (r.verdict == VerdictKind::CriticalPoint ? to_string(r.cls) : "") << "\n";
    }
}

inline void write_remark_csv(std::ostream& os, const RemarkReport& report) {
    os << "index,m1,m2,alpha,beta,delta0,delta_full,delta1,delta2,exhausted,"
          "exceeds_min,violates_max\n";
    for (const RemarkInstance& r : report.rows) {
        os << r.index << "," << r.m1 << "," << r.m2 << "," << fmt(r.alpha) << "," << fmt(r.beta)
           << "," << fmt(r.delta0) << "," << fmt(r.delta_full) << "," << fmt(r.delta1) << ","
           << fmt(r.delta2) << "," << (r.exhausted ? 1 : 0) << "," << (r.exceeds_min ? 1 : 0)
           << "," << (r.violates_max ? 1 : 0) << "\n";
    }
}

inline void write_claim6_csv(std::ostream& os, const Claim6Report& report) {
    os << "index,x0,y0,outcome,verdict,iterations,xf,yf,final_grad_norm\n";
    for (const Claim6Row& r : report.rows) {
        os << r.index << "," << fmt(r.z0[0]) << "," << fmt(r.z0[1]) << "," << to_string(r.outcome)
           << "," << to_string(r.verdict) << "," << r.iterations << "," << fmt(r.final_point[0])
           << "," << fmt(r.final_point[1]) << "," << fmt(r.final_grad_norm) << "\n";
    }
}

// ---------------------------------------------------------------------------
// JSON-lines summaries
// ---------------------------------------------------------------------------

inline json trajectory_summary(const Trajectory& traj) {
    const IterateRecord& last = traj.final_record();
    json j{{"method", to_string(traj.method)},
           {"verdict", to_string(traj.verdict.kind)},
           {"iterations", static_cast<long>(traj.records.size()) - 1},
           {"final_point", last.z},
           {"final_value", last.value},
           {"final_gradient_norm", last.grad_norm}};
    if (traj.verdict.limit_point) j["limit_point"] = *traj.verdict.limit_point;
    if (traj.params) {
        j["alpha"] = traj.params->alpha;
        j["beta"] = traj.params->beta;
        j["delta0"] = traj.params->delta0;
    } else {
        j["delta0"] = traj.fixed_delta0;
    }
    return j;
}

inline json basin_summary(const BasinReport& r) {
    return json{{"experiment", "basin"},
                {"samples", r.samples},
                {"critical_point", r.critical},
                {"diverged", r.diverged},
                {"max_iterations", r.max_iterations},
                {"numerical_breakdown", r.breakdown},
                {"local_minimum", r.local_minimum},
                {"origin", r.origin},
                {"generalized_saddle", r.generalized_saddle},
                {"degenerate", r.degenerate}};
}

inline json remark_summary(const RemarkReport& r) {
    return json{{"experiment", "remark"},
                {"instances", r.instances},
                {"max_violations", r.max_violations},
                {"min_exceed_count", r.min_exceed_count},
                {"min_exceed_frequency", r.min_exceed_frequency()},
                {"exhausted_skipped", r.exhausted_skipped},
                {"violation_indices", r.violation_indices},
                {"passed", r.passed()}};
}

inline json claim6_summary(const Claim6Report& r) {
    return json{{"experiment", "claim6"},
                {"samples", r.samples},
                {"off_axis_critical", r.case1},
                {"axis_cluster", r.case2},
                {"anomalies", r.anomalies},
                {"anomaly_indices", r.anomaly_indices}};
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write to " + path.string());
    return os;
}

inline void write_json_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
    std::ofstream os = open_output(path);
    for (const json& j : lines) os << j.dump() << "\n";
}

}  // namespace cwgd
