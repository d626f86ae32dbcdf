#include "attractorlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "attractorlab/numfmt.hpp"

namespace attractorlab {

using nlohmann::json;

Field FieldSource::sample(const Grid& g) const {
    if (kind == Kind::expression) return sample_expr(g, parsed);
    if (values.size() != g.size())
        throw ConfigError("field file '" + csv_path + "': expected " +
                          std::to_string(g.size()) + " values, got " +
                          std::to_string(values.size()));
    Field f(g);
    f.v = values;
    for (double x : f.v)
        if (!std::isfinite(x)) throw ConfigError("field file '" + csv_path + "': non-finite value");
    return f;
}

StaggeredField FieldSource::sample_ifaces(const Grid& g) const {
    if (kind == Kind::expression) return sample_expr_staggered(g, parsed);
    // No analytic form: average the node samples (boundary copies interior).
    Field nodes = sample(g);
    const int n = g.n;
    StaggeredField s(g);
    auto node = [&](int mx, int my) {
        return nodes.v[g.dim == 1 ? static_cast<std::size_t>(mx)
                                  : static_cast<std::size_t>(mx) * n + my];
    };
    if (g.dim == 1) {
        for (int i = 0; i <= n; ++i)
            s.axis[0][i] = 0.5 * (node(std::max(0, i - 1), 0) + node(std::min(n - 1, i), 0));
    } else {
        for (int ix = 0; ix <= n; ++ix)
            for (int my = 0; my < n; ++my)
                s.axis[0][static_cast<std::size_t>(ix) * n + my] =
                    0.5 * (node(std::max(0, ix - 1), my) + node(std::min(n - 1, ix), my));
        for (int mx = 0; mx < n; ++mx)
            for (int iy = 0; iy <= n; ++iy)
                s.axis[1][static_cast<std::size_t>(mx) * (n + 1) + iy] =
                    0.5 * (node(mx, std::max(0, iy - 1)) + node(mx, std::min(n - 1, iy)));
    }
    return s;
}

FieldSource FieldSource::constant(double v) {
    FieldSource f;
    f.kind = Kind::expression;
    f.text = format_double(v);
    f.parsed = parse_expr(f.text);
    return f;
}

FieldSource FieldSource::expression(const std::string& text) {
    FieldSource f;
    f.kind = Kind::expression;
    f.text = text;
    f.parsed = parse_expr(text);
    return f;
}

namespace {

FieldSource field_source_from(const json& j, const std::string& where) {
    if (j.is_number()) return FieldSource::constant(j.get<double>());
    if (j.is_string()) {
        try {
            return FieldSource::expression(j.get<std::string>());
        } catch (const ExprError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (j.is_object() && j.contains("csv")) {
        FieldSource f;
        f.kind = FieldSource::Kind::values;
        f.csv_path = j.at("csv").get<std::string>();
        std::ifstream in(f.csv_path);
        if (!in) throw ConfigError(where + ": cannot open field file '" + f.csv_path + "'");
        std::string tok;
        while (std::getline(in, tok)) {
            std::stringstream line(tok);
            std::string cell;
            while (std::getline(line, cell, ','))
                if (!cell.empty()) f.values.push_back(std::stod(cell));
        }
        return f;
    }
    throw ConfigError(where + ": expected number, expression string, or {\"csv\": path}");
}

template <class T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    {
        const json& g = j.at("grid");
        c.grid.dim = g.at("dim").get<int>();
        c.grid.half_width = g.at("half_width").get<double>();
        c.grid.n = g.at("n").get<int>();
    }
    {
        const json& co = j.at("coefficients");
        c.coefficients.eps = co.at("eps").get<double>();
        c.coefficients.alpha = field_source_from(co.at("alpha"), "coefficients.alpha");
        c.coefficients.beta = field_source_from(co.at("beta"), "coefficients.beta");
        c.coefficients.a.clear();
        if (co.contains("a")) {
            const json& a = co.at("a");
            if (a.is_array())
                for (const auto& e : a)
                    c.coefficients.a.push_back(field_source_from(e, "coefficients.a"));
            else
                c.coefficients.a.push_back(field_source_from(a, "coefficients.a"));
        } else {
            c.coefficients.a.push_back(FieldSource::constant(1.0));
        }
    }
    if (j.contains("nonlinearity")) {
        const json& nl = j.at("nonlinearity");
        c.nonlinearity.kind = get_or<std::string>(nl, "kind", "builtin");
        if (c.nonlinearity.kind != "builtin")
            throw ConfigError("nonlinearity.kind: only 'builtin' is configurable from JSON");
        if (nl.contains("g")) c.nonlinearity.g = field_source_from(nl.at("g"), "nonlinearity.g");
        if (nl.contains("b")) c.nonlinearity.b = field_source_from(nl.at("b"), "nonlinearity.b");
        c.nonlinearity.rhobar = get_or<double>(nl, "rhobar", 0.0);
        if (nl.contains("Cbar")) c.nonlinearity.Cbar = nl.at("Cbar").get<double>();
        if (nl.contains("a_weight"))
            c.nonlinearity.a_weight = field_source_from(nl.at("a_weight"), "nonlinearity.a_weight");
        c.nonlinearity.dissipativity_route =
            get_or<std::string>(nl, "dissipativity_route", "closed_form");
        if (nl.contains("D")) c.nonlinearity.D = field_source_from(nl.at("D"), "nonlinearity.D");
        c.nonlinearity.conv_gamma = get_or<double>(nl, "conv_gamma", 2.0);
        c.nonlinearity.conv_nu = get_or<double>(nl, "conv_nu", 2.0);
    }
    if (j.contains("evolution")) {
        const json& ev = j.at("evolution");
        c.evolution.dt = get_or<double>(ev, "dt", 1e-3);
        c.evolution.T = get_or<double>(ev, "T", 1.0);
        c.evolution.record_every = get_or<int>(ev, "record_every", 1);
        c.evolution.cg_tol = get_or<double>(ev, "cg_tol", 1e-10);
        c.evolution.scheme = get_or<std::string>(ev, "scheme", "strang");
        if (c.evolution.scheme != "strang" && c.evolution.scheme != "lie")
            throw ConfigError("evolution.scheme: expected 'strang' or 'lie'");
    }
    if (j.contains("initial")) {
        const json& in = j.at("initial");
        c.initial.kind = get_or<std::string>(in, "kind", "gaussian");
        c.initial.amp = get_or<double>(in, "amp", 1.0);
        c.initial.sigma = get_or<double>(in, "sigma", 1.0);
        if (in.contains("center")) {
            if (in.at("center").is_array())
                c.initial.center = in.at("center").get<std::vector<double>>();
            else
                c.initial.center = {in.at("center").get<double>()};
        }
        c.initial.on = get_or<std::string>(in, "on", "u");
        c.initial.seed = get_or<std::uint64_t>(in, "seed", 1);
        c.initial.smoothing = get_or<int>(in, "smoothing", 4);
        if (in.contains("R_declared")) c.initial.R_declared = in.at("R_declared").get<double>();
        if (c.initial.kind != "gaussian" && c.initial.kind != "random")
            throw ConfigError("initial.kind: expected 'gaussian' or 'random'");
        if (c.initial.on != "u" && c.initial.on != "v" && c.initial.on != "both")
            throw ConfigError("initial.on: expected 'u', 'v', or 'both'");
    }
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        c.diagnostics.weights = get_or<std::string>(d, "weights", "ones");
        if (c.diagnostics.weights != "ones" && c.diagnostics.weights != "cutoff")
            throw ConfigError("diagnostics.weights: expected 'ones' or 'cutoff'");
        if (d.contains("ks")) c.diagnostics.ks = d.at("ks").get<std::vector<double>>();
        c.diagnostics.theta = get_or<double>(d, "theta", 0.5);
        if (d.contains("checks"))
            c.diagnostics.checks = d.at("checks").get<std::vector<std::string>>();
        c.diagnostics.identity_rel_tol = get_or<double>(d, "identity_rel_tol", 1e-4);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        c.output.csv_path = get_or<std::string>(o, "csv_path", "series.csv");
        c.output.json_path = get_or<std::string>(o, "json_path", "report.json");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

}  // namespace attractorlab
