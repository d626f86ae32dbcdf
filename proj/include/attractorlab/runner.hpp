#pragma once

#include <optional>
#include <string>

#include "attractorlab/config.hpp"
#include "attractorlab/diagnostics.hpp"

#include "json.hpp"

namespace attractorlab {

// Assembled experiment objects shared by the subcommands.
struct Lab {
    ExperimentConfig cfg;
    std::uint64_t seed = 1;
    Grid grid;
    CoefficientSet coeffs;
    NonlinearitySpec spec;
    bool linear = false;  // f identically zero
    StateZ z0;
};

Lab build_lab(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed_override);

// Pipeline products past the hypothesis audit.
struct Assembled {
    nlohmann::json hypotheses;
    DissipativityCertificate cert;
    ConstantsBundle bundle;
    Rates rates;
    CoerciveConstants coercive_zero;
    CoerciveConstants coercive_ultimate;
    EigenResult lambda;
};

// Steps 1-3 of the pipeline: ellipticity and spectral hypotheses, uniformly
// local norms, growth and dissipativity certificates, rate selection.
Assembled audit_and_constants(Lab& lab);

struct RunResult {
    int exit_code = 0;
    nlohmann::json report;
};

// Full pipeline: audit, constants (both modes), evolution, requested checks,
// CSV/JSON emission. check_filter empty runs the configured list.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                         std::optional<std::uint64_t> seed_override,
                         const std::vector<std::string>& check_filter = {});

// Subcommand entry points; each writes its JSON report under out_dir.
RunResult run_hypotheses(const ExperimentConfig&, const std::string& out_dir,
                         std::optional<std::uint64_t> seed);
RunResult run_lambda1(const ExperimentConfig&, const std::string& out_dir,
                      std::optional<std::uint64_t> seed);
RunResult run_constants(const ExperimentConfig&, const std::string& out_dir,
                        std::optional<std::uint64_t> seed);
RunResult run_dissipativity(const ExperimentConfig&, const std::string& out_dir,
                            std::optional<std::uint64_t> seed);

// Maps an exception to the documented exit code and a stderr line.
int exit_code_for_current_exception();

// Writes the recorded series as CSV with the documented fixed header. Extra
// per-record columns (e.g. check slacks) are padded with NaN where undefined.
void write_csv(const std::string& path, const Trajectory& traj,
               const std::vector<std::string>& column_order,
               const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json bundle_to_json(const ConstantsBundle& b);
nlohmann::json tail_report_to_json(const TailReport& r);

}  // namespace attractorlab
