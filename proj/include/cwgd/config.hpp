#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cwgd/objective.hpp"
#include "cwgd/optimize.hpp"

/// \file config.hpp
///
/// Flat key-value configuration documents: one assignment per line, sections
/// by bracketed headers, '#' comments.  Parsing collects every validation
/// error rather than stopping at the first.

namespace cwgd {

enum class ExperimentKind { Single, Sweep, Remark, Basin, Claim6, Invariants };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Single: return "single";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::Remark: return "remark";
        case ExperimentKind::Basin: return "basin";
        case ExperimentKind::Claim6: return "claim6";
        case ExperimentKind::Invariants: return "invariants";
    }
    return "?";
}

enum class ObjectiveTag { Quadratic, IllQuadratic, ExampleG, ExampleG2d };

inline const char* to_string(ObjectiveTag t) {
    switch (t) {
        case ObjectiveTag::Quadratic: return "quadratic";
        case ObjectiveTag::IllQuadratic: return "ill-quadratic";
        case ObjectiveTag::ExampleG: return "example-g";
        case ObjectiveTag::ExampleG2d: return "example-g-2d";
    }
    return "?";
}

enum class OutputFormat { Csv, JsonLines };

inline const char* to_string(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json-lines";
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Single;
    MethodTag method = MethodTag::BacktrackingGd;
    ObjectiveTag objective = ObjectiveTag::ExampleG2d;
    double lambda = 1.0;           // quadratic curvature
    Vector coeffs = {1.0, 100.0};  // ill-quadratic diagonal
    Vector z0 = {0.5, 0.5};
    long sample_count = 1000;
    std::uint64_t seed = 0;
    double init_lo = -1.0, init_hi = 1.0;
    bool randomize_params = true;
    long thinning_stride = 1;

    double alpha = 0.5, beta = 0.5, delta0 = 1.0;
    StoppingRule stop;

    double shrink = 0.5;
    double l_floor = 0.0;

    std::string output_dir = "out";
    OutputFormat format = OutputFormat::Csv;

    LineSearchParams line_search_params() const { return LineSearchParams(alpha, beta, delta0); }

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
        return a.kind == b.kind && a.method == b.method && a.objective == b.objective &&
               a.lambda == b.lambda && a.coeffs == b.coeffs && a.z0 == b.z0 &&
               a.sample_count == b.sample_count && a.seed == b.seed && a.init_lo == b.init_lo &&
               a.init_hi == b.init_hi && a.randomize_params == b.randomize_params &&
               a.thinning_stride == b.thinning_stride && a.alpha == b.alpha && a.beta == b.beta &&
               a.delta0 == b.delta0 && a.stop.max_iterations == b.stop.max_iterations &&
               a.stop.gradient_tolerance == b.stop.gradient_tolerance &&
               a.stop.divergence_radius == b.stop.divergence_radius &&
               a.stop.stall_step_tolerance == b.stop.stall_step_tolerance &&
               a.shrink == b.shrink && a.l_floor == b.l_floor && a.output_dir == b.output_dir &&
               a.format == b.format;
    }
};

struct ConfigParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ConfigReader {
    std::vector<std::string>& errors;

    bool parse_double(const std::string& v, int line, const std::string& key, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return true;
        } catch (...) {
            errors.push_back("line " + std::to_string(line) + ": " + key +
                             " is not a number: '" + v + "'");
            return false;
        }
    }

    bool parse_long(const std::string& v, int line, const std::string& key, long& out) {
        try {
            std::size_t pos = 0;
            out = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return true;
        } catch (...) {
            errors.push_back("line " + std::to_string(line) + ": " + key +
                             " is not an integer: '" + v + "'");
            return false;
        }
    }

    bool parse_bool(const std::string& v, int line, const std::string& key, bool& out) {
        if (v == "true") { out = true; return true; }
        if (v == "false") { out = false; return true; }
        errors.push_back("line " + std::to_string(line) + ": " + key +
                         " must be 'true' or 'false'");
        return false;
    }

    bool parse_vector(const std::string& v, int line, const std::string& key, Vector& out) {
        std::istringstream is(v);
        Vector parsed;
        std::string tok;
        while (is >> tok) {
            double x;
            if (!parse_double(tok, line, key, x)) return false;
            parsed.push_back(x);
        }
        if (parsed.empty()) {
            errors.push_back("line " + std::to_string(line) + ": " + key + " is empty");
            return false;
        }
        out = std::move(parsed);
        return true;
    }
};

}  // namespace detail

inline std::optional<ExperimentKind> experiment_kind_from(const std::string& s) {
    for (ExperimentKind k : {ExperimentKind::Single, ExperimentKind::Sweep, ExperimentKind::Remark,
                             ExperimentKind::Basin, ExperimentKind::Claim6,
                             ExperimentKind::Invariants})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

inline std::optional<MethodTag> method_tag_from(const std::string& s) {
    for (MethodTag m : {MethodTag::StandardGd, MethodTag::BacktrackingGd,
                        MethodTag::TwoWayBacktrackingGd, MethodTag::CoordinatewiseBacktrackingGd,
                        MethodTag::CoordinatewiseTwoWayGd, MethodTag::CoordinatewiseGdNew,
                        MethodTag::FullSpaceGdNew})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

inline std::optional<ObjectiveTag> objective_tag_from(const std::string& s) {
    for (ObjectiveTag t : {ObjectiveTag::Quadratic, ObjectiveTag::IllQuadratic,
                           ObjectiveTag::ExampleG, ObjectiveTag::ExampleG2d})
        if (s == to_string(t)) return t;
    return std::nullopt;
}

/// `kind_override`, when given, wins over any kind in the document (the CLI
/// subcommand) and is applied before validation.
inline ConfigParseResult parse_config(const std::string& text,
                                      std::optional<ExperimentKind> kind_override = std::nullopt) {
    ConfigParseResult result;
    ExperimentConfig cfg;
    detail::ConfigReader reader{result.errors};
    bool saw_method = false;

    std::istringstream stream(text);
    std::string raw;
    std::string section = "experiment";
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        std::string s = detail::trim(raw);
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = detail::trim(s.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                result.errors.push_back("line " + std::to_string(line) + ": malformed section header");
                continue;
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "experiment" && section != "line_search" && section != "stopping" &&
                section != "model" && section != "output")
                result.errors.push_back("line " + std::to_string(line) + ": unknown section [" +
                                        section + "]");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back("line " + std::to_string(line) + ": expected 'key = value'");
            continue;
        }
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        std::string qual = section + "." + key;

        if (qual == "experiment.kind") {
            if (auto k = experiment_kind_from(value)) cfg.kind = *k;
            else result.errors.push_back("line " + std::to_string(line) + ": unknown kind '" + value + "'");
        } else if (qual == "experiment.method") {
            saw_method = true;
            if (auto m = method_tag_from(value)) cfg.method = *m;
            else result.errors.push_back("line " + std::to_string(line) + ": unknown method '" + value + "'");
        } else if (qual == "experiment.objective") {
            if (auto t = objective_tag_from(value)) cfg.objective = *t;
            else result.errors.push_back("line " + std::to_string(line) + ": unknown objective '" + value + "'");
        } else if (qual == "experiment.lambda") {
            reader.parse_double(value, line, key, cfg.lambda);
        } else if (qual == "experiment.coeffs") {
            reader.parse_vector(value, line, key, cfg.coeffs);
        } else if (qual == "experiment.z0") {
            reader.parse_vector(value, line, key, cfg.z0);
        } else if (qual == "experiment.sample_count") {
            reader.parse_long(value, line, key, cfg.sample_count);
        } else if (qual == "experiment.seed") {
            long v;
            if (reader.parse_long(value, line, key, v)) cfg.seed = static_cast<std::uint64_t>(v);
        } else if (qual == "experiment.init_box") {
            Vector box;
            if (reader.parse_vector(value, line, key, box)) {
                if (box.size() != 2)
                    result.errors.push_back("line " + std::to_string(line) +
                                            ": init_box needs exactly two numbers (lo hi)");
                else {
                    cfg.init_lo = box[0];
                    cfg.init_hi = box[1];
                }
            }
        } else if (qual == "experiment.randomize_params") {
            reader.parse_bool(value, line, key, cfg.randomize_params);
        } else if (qual == "experiment.thinning_stride") {
            reader.parse_long(value, line, key, cfg.thinning_stride);
        } else if (qual == "line_search.alpha") {
            reader.parse_double(value, line, key, cfg.alpha);
        } else if (qual == "line_search.beta") {
            reader.parse_double(value, line, key, cfg.beta);
        } else if (qual == "line_search.delta0") {
            reader.parse_double(value, line, key, cfg.delta0);
        } else if (qual == "stopping.max_iterations") {
            reader.parse_long(value, line, key, cfg.stop.max_iterations);
        } else if (qual == "stopping.gradient_tolerance") {
            reader.parse_double(value, line, key, cfg.stop.gradient_tolerance);
        } else if (qual == "stopping.divergence_radius") {
            reader.parse_double(value, line, key, cfg.stop.divergence_radius);
        } else if (qual == "stopping.stall_step_tolerance") {
            reader.parse_double(value, line, key, cfg.stop.stall_step_tolerance);
        } else if (qual == "model.shrink") {
            reader.parse_double(value, line, key, cfg.shrink);
        } else if (qual == "model.l_floor") {
            reader.parse_double(value, line, key, cfg.l_floor);
        } else if (qual == "output.directory") {
            cfg.output_dir = value;
        } else if (qual == "output.format") {
            if (value == "csv") cfg.format = OutputFormat::Csv;
            else if (value == "json-lines") cfg.format = OutputFormat::JsonLines;
            else result.errors.push_back("line " + std::to_string(line) +
                                         ": format must be 'csv' or 'json-lines'");
        } else {
            result.errors.push_back("line " + std::to_string(line) + ": unknown key '" + qual + "'");
        }
    }

    if (kind_override) cfg.kind = *kind_override;
    bool needs_method = cfg.kind == ExperimentKind::Single || cfg.kind == ExperimentKind::Sweep ||
                        cfg.kind == ExperimentKind::Basin;
    if (needs_method && !saw_method)
        result.errors.push_back("missing field: method");

    // Range validation (reported together with any syntax errors above).
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) result.errors.push_back("alpha must lie in (0,1)");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) result.errors.push_back("beta must lie in (0,1)");
    if (!(cfg.delta0 > 0.0)) result.errors.push_back("delta0 must be positive");
    if (cfg.stop.max_iterations < 1) result.errors.push_back("max_iterations must be >= 1");
    if (!(cfg.stop.gradient_tolerance > 0.0))
        result.errors.push_back("gradient_tolerance must be positive");
    if (!(cfg.stop.divergence_radius > 0.0))
        result.errors.push_back("divergence_radius must be positive");
    if (cfg.stop.stall_step_tolerance < 0.0)
        result.errors.push_back("stall_step_tolerance must be >= 0");
    if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) result.errors.push_back("shrink must lie in (0,1)");
    if (cfg.l_floor < 0.0) result.errors.push_back("l_floor must be >= 0");
    if (cfg.sample_count < 1) result.errors.push_back("sample_count must be >= 1");
    if (cfg.thinning_stride < 1) result.errors.push_back("thinning_stride must be >= 1");
    if (!(cfg.init_lo < cfg.init_hi)) result.errors.push_back("init_box must satisfy lo < hi");
    if (cfg.z0.empty()) result.errors.push_back("z0 must not be empty");

    if (result.errors.empty()) result.config = cfg;
    return result;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_double;
    std::ostringstream os;
    os << "[experiment]\n";
    os << "kind = " << to_string(cfg.kind) << "\n";
    os << "method = " << to_string(cfg.method) << "\n";
    os << "objective = " << to_string(cfg.objective) << "\n";
    os << "lambda = " << format_double(cfg.lambda) << "\n";
    os << "coeffs =";
    for (double c : cfg.coeffs) os << " " << format_double(c);
    os << "\n";
    os << "z0 =";
    for (double c : cfg.z0) os << " " << format_double(c);
    os << "\n";
    os << "sample_count = " << cfg.sample_count << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "init_box = " << format_double(cfg.init_lo) << " " << format_double(cfg.init_hi) << "\n";
    os << "randomize_params = " << (cfg.randomize_params ? "true" : "false") << "\n";
    os << "thinning_stride = " << cfg.thinning_stride << "\n";
    os << "\n[line_search]\n";
    os << "alpha = " << format_double(cfg.alpha) << "\n";
    os << "beta = " << format_double(cfg.beta) << "\n";
    os << "delta0 = " << format_double(cfg.delta0) << "\n";
    os << "\n[stopping]\n";
    os << "max_iterations = " << cfg.stop.max_iterations << "\n";
    os << "gradient_tolerance = " << format_double(cfg.stop.gradient_tolerance) << "\n";
    os << "divergence_radius = " << format_double(cfg.stop.divergence_radius) << "\n";
    os << "stall_step_tolerance = " << format_double(cfg.stop.stall_step_tolerance) << "\n";
    os << "\n[model]\n";
    os << "shrink = " << format_double(cfg.shrink) << "\n";
    os << "l_floor = " << format_double(cfg.l_floor) << "\n";
    os << "\n[output]\n";
    os << "directory = " << cfg.output_dir << "\n";
    os << "format = " << to_string(cfg.format) << "\n";
    return os.str();
}

}  // namespace cwgd
