// Batch front-end for the coordinate-wise line-search experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cwgd/config.hpp"
#include "cwgd/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::int64_t seed = -1;
    std::int64_t samples = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Configuration file");
    cmd->add_option("--seed", flags.seed, "Override the master seed");
    cmd->add_option("--out", flags.out_dir, "Override the output directory");
    cmd->add_option("--format", flags.format, "Output format: csv or json-lines")
        ->check(CLI::IsMember({"csv", "json-lines"}));
    cmd->add_option("--samples", flags.samples, "Override the sample count");
}

int run_kind(cwgd::ExperimentKind kind, const CommonFlags& flags) {
    std::string text;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) {
            std::cerr << "error: cannot read config file " << flags.config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    cwgd::ConfigParseResult parsed = cwgd::parse_config(text, kind);
    if (!parsed.ok()) {
        for (const std::string& e : parsed.errors) std::cerr << "config error: " << e << "\n";
        return 2;
    }
    cwgd::ExperimentConfig cfg = *parsed.config;
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
    if (flags.samples > 0) cfg.sample_count = flags.samples;
    if (flags.format == "csv") cfg.format = cwgd::OutputFormat::Csv;
    if (flags.format == "json-lines") cfg.format = cwgd::OutputFormat::JsonLines;

    try {
        cwgd::RunResult result = cwgd::run_experiment(cfg);
        for (const std::string& line : result.console_lines) std::cout << line << "\n";
        std::cout << "outputs in " << cfg.output_dir << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-descent line-search experiments (coordinate-wise Armijo variants)"};
    app.require_subcommand(1);

    CommonFlags flags;
    struct Sub {
        const char* name;
        const char* help;
        cwgd::ExperimentKind kind;
    };
    const Sub subs[] = {
        {"run", "Single trajectory from the configured initial point", cwgd::ExperimentKind::Single},
        {"sweep", "Trajectories from sampled initial points", cwgd::ExperimentKind::Sweep},
        {"check", "Randomized invariant checks (nonzero exit on any violation)",
         cwgd::ExperimentKind::Invariants},
        {"basin", "Basin-of-attraction classification on g(x)+g(y)", cwgd::ExperimentKind::Basin},
        {"remark", "Max-inequality falsification harness", cwgd::ExperimentKind::Remark},
        {"claim6", "Full-space dichotomy check on g(x)+g(y)", cwgd::ExperimentKind::Claim6},
    };
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, flags);
        cmd->callback([&flags, kind = s.kind]() { std::exit(run_kind(kind, flags)); });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
