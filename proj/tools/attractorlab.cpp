#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "attractorlab/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", opts.out_dir, "directory for CSV/JSON outputs");
    cmd->add_option("--seed", [&opts](const std::vector<std::string>& vals) {
        opts.seed = std::stoull(vals.at(0));
        return true;
    }, "override the config seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attractorlab: verification lab for damped semilinear wave equations"};
    app.require_subcommand(1);

    CommonOpts opts;
    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {
        {"hypotheses", "validate structural hypotheses and report certificates"},
        {"lambda1", "compute the principal eigenvalue of the stationary operator"},
        {"constants", "assemble the full constants bundle and tail reports"},
        {"simulate", "run the configured experiment with its check battery"},
        {"decay", "verify the linear exponential decay bound"},
        {"tails", "verify the exterior-energy tail bounds"},
        {"dissipativity", "build and audit the dissipativity certificate"},
        {"identities", "verify the energy identities along a trajectory"},
    };
    for (const auto& c : cmds) attach_common(app.add_subcommand(c.name, c.help), opts);

    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands().front()->get_name();

    try {
        attractorlab::ExperimentConfig cfg = attractorlab::load_config(opts.config_path);
        attractorlab::RunResult res;
        if (sub == "hypotheses")
            res = attractorlab::run_hypotheses(cfg, opts.out_dir, opts.seed);
        else if (sub == "lambda1")
            res = attractorlab::run_lambda1(cfg, opts.out_dir, opts.seed);
        else if (sub == "constants")
            res = attractorlab::run_constants(cfg, opts.out_dir, opts.seed);
        else if (sub == "dissipativity")
            res = attractorlab::run_dissipativity(cfg, opts.out_dir, opts.seed);
        else if (sub == "simulate")
            res = attractorlab::run_experiment(cfg, opts.out_dir, opts.seed);
        else if (sub == "decay")
            res = attractorlab::run_experiment(cfg, opts.out_dir, opts.seed, {"decay"});
        else if (sub == "tails")
            res = attractorlab::run_experiment(cfg, opts.out_dir, opts.seed, {"tails"});
        else if (sub == "identities")
            res = attractorlab::run_experiment(cfg, opts.out_dir, opts.seed, {"identities"});

        if (res.report.contains("checks")) {
            for (const auto& v : res.report["checks"])
                std::cout << (v["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
                          << v["name"].get<std::string>() << "\n";
        }
        std::cout << sub << ": exit " << res.exit_code << "\n";
        return res.exit_code;
    } catch (...) {
        return attractorlab::exit_code_for_current_exception();
    }
}
