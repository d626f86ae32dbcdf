#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attractorlab/expr.hpp"
#include "attractorlab/grid.hpp"

#include "json.hpp"

namespace attractorlab {

// A coefficient entry: constant, expression text, or a flat CSV of node
// values. Expressions are the primary input; files exist for measured data.
struct FieldSource {
    enum class Kind { expression, values };
    Kind kind = Kind::expression;
    std::string text = "0";
    Expr parsed;
    std::vector<double> values;
    std::string csv_path;

    Field sample(const Grid& g) const;
    // Interface samples: analytic for expressions, node averages for values.
    StaggeredField sample_ifaces(const Grid& g) const;

    static FieldSource constant(double v);
    static FieldSource expression(const std::string& text);
};

struct GridConfig {
    int dim = 1;
    double half_width = 1.0;
    int n = 3;
};

struct CoefficientsConfig {
    double eps = 1.0;
    FieldSource alpha = FieldSource::constant(1.0);
    FieldSource beta = FieldSource::constant(0.0);
    std::vector<FieldSource> a;  // one entry per axis; single entry reused
};

struct NonlinearityConfig {
    std::string kind = "builtin";
    FieldSource g = FieldSource::constant(0.0);
    FieldSource b = FieldSource::constant(0.0);
    double rhobar = 0.0;
    std::optional<double> Cbar;
    std::optional<FieldSource> a_weight;
    // Optional convexity-route certificate inputs.
    std::string dissipativity_route = "closed_form";  // or "convexity"
    std::optional<FieldSource> D;
    double conv_gamma = 2.0;
    double conv_nu = 2.0;
};

struct EvolutionSettings {
    double dt = 1e-3;
    double T = 1.0;
    int record_every = 1;
    double cg_tol = 1e-10;
    std::string scheme = "strang";
};

struct InitialConfig {
    std::string kind = "gaussian";  // or "random"
    double amp = 1.0;
    double sigma = 1.0;
    std::vector<double> center;  // per axis, defaults to origin
    std::string on = "u";        // u | v | both
    std::uint64_t seed = 1;
    int smoothing = 4;
    std::optional<double> R_declared;
};

struct DiagnosticsConfig {
    std::string weights = "ones";  // ones | cutoff
    std::vector<double> ks;
    double theta = 0.5;
    std::vector<std::string> checks;  // subset of decay identities eta tails ultimate ygrowth
    double identity_rel_tol = 1e-4;
};

struct OutputConfig {
    std::string csv_path = "series.csv";
    std::string json_path = "report.json";
};

struct ExperimentConfig {
    GridConfig grid;
    CoefficientsConfig coefficients;
    NonlinearityConfig nonlinearity;
    EvolutionSettings evolution;
    InitialConfig initial;
    DiagnosticsConfig diagnostics;
    OutputConfig output;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace attractorlab
