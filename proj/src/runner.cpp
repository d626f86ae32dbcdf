#include "attractorlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "attractorlab/numfmt.hpp"
#include "attractorlab/rng.hpp"

namespace attractorlab {

using nlohmann::json;

namespace {

void smooth_field(Field& f, int passes) {
    const Grid& g = f.grid;
    const int n = g.n;
    Field tmp(g);
    for (int p = 0; p < passes; ++p) {
        if (g.dim == 1) {
            for (int m = 0; m < n; ++m) {
                double l = m > 0 ? f.v[m - 1] : 0.0;
                double r = m < n - 1 ? f.v[m + 1] : 0.0;
                tmp.v[m] = 0.25 * (l + 2.0 * f.v[m] + r);
            }
        } else {
            for (int mx = 0; mx < n; ++mx)
                for (int my = 0; my < n; ++my) {
                    std::size_t id = static_cast<std::size_t>(mx) * n + my;
                    double xl = mx > 0 ? f.v[id - n] : 0.0;
                    double xr = mx < n - 1 ? f.v[id + n] : 0.0;
                    double yl = my > 0 ? f.v[id - 1] : 0.0;
                    double yr = my < n - 1 ? f.v[id + 1] : 0.0;
                    tmp.v[id] = 0.125 * (xl + xr + yl + yr + 4.0 * f.v[id]);
                }
        }
        std::swap(f.v, tmp.v);
    }
}

StateZ build_initial(const InitialConfig& init, const Grid& g, std::uint64_t seed) {
    StateZ z(g);
    if (init.kind == "gaussian") {
        std::vector<double> center = init.center;
        center.resize(g.dim, 0.0);
        double s2 = 2.0 * init.sigma * init.sigma;
        Field bump = make_field(g, [&](double x, double y) {
            double d2 = (x - center[0]) * (x - center[0]);
            if (g.dim == 2) d2 += (y - center[1]) * (y - center[1]);
            return init.amp * std::exp(-d2 / s2);
        });
        if (init.on == "u" || init.on == "both") z.u = bump;
        if (init.on == "v" || init.on == "both") z.v = bump;
    } else {
        Rng rng(seed);
        if (init.on == "u" || init.on == "both")
            for (auto& v : z.u.v) v = init.amp * rng.symmetric();
        if (init.on == "v" || init.on == "both")
            for (auto& v : z.v.v) v = init.amp * rng.symmetric();
        smooth_field(z.u, init.smoothing);
        smooth_field(z.v, init.smoothing);
    }
    return z;
}

double field_abs_max(const Field& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::abs(v));
    return m;
}

json audit_report_to_json(const AuditReport& r) {
    return json{{"max_violation", r.max_violation},
                {"witness_node", r.witness_node},
                {"witness_u", r.witness_u},
                {"pass", r.pass()}};
}

}  // namespace

Lab build_lab(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed_override) {
    Lab lab;
    lab.cfg = cfg;
    lab.seed = seed_override.value_or(cfg.initial.seed);
    lab.grid = build_grid(cfg.grid.dim, cfg.grid.half_width, cfg.grid.n);

    Field alpha = cfg.coefficients.alpha.sample(lab.grid);
    Field beta = cfg.coefficients.beta.sample(lab.grid);
    if (cfg.coefficients.a.empty()) throw ConfigError("coefficients.a: no entries");
    StaggeredField a(lab.grid);
    for (int d = 0; d < lab.grid.dim; ++d) {
        const FieldSource& src =
            cfg.coefficients.a[std::min<std::size_t>(d, cfg.coefficients.a.size() - 1)];
        a.axis[d] = src.sample_ifaces(lab.grid).axis[d];
    }
    lab.coeffs = make_coefficients(lab.grid, cfg.coefficients.eps, std::move(alpha),
                                   std::move(beta), std::move(a));

    Field g_field = cfg.nonlinearity.g.sample(lab.grid);
    Field b_field = cfg.nonlinearity.b.sample(lab.grid);
    Field a_weight = cfg.nonlinearity.a_weight ? cfg.nonlinearity.a_weight->sample(lab.grid)
                                               : Field(lab.grid, 0.0);
    lab.linear = field_abs_max(g_field) == 0.0 && field_abs_max(b_field) == 0.0;
    lab.spec = make_builtin(lab.grid, std::move(g_field), std::move(b_field),
                            cfg.nonlinearity.rhobar, std::move(a_weight),
                            cfg.nonlinearity.Cbar.value_or(-1.0));
    lab.z0 = build_initial(cfg.initial, lab.grid, lab.seed);
    return lab;
}

Assembled audit_and_constants(Lab& lab) {
    const ExperimentConfig& cfg = lab.cfg;
    Assembled A;
    json& hyp = A.hypotheses;
    hyp["ellipticity"] = {{"a0", lab.coeffs.a0}, {"a1", lab.coeffs.a1}, {"pass", true}};
    hyp["damping"] = {{"alpha0", lab.coeffs.alpha0},
                      {"alpha1", lab.coeffs.alpha1},
                      {"eps", lab.coeffs.eps}};

    A.lambda = principal_eigenvalue(lab.coeffs, 1e-10);
    hyp["lambda1"] = {{"value", A.lambda.value}, {"iterations", A.lambda.iterations}};
    if (!(A.lambda.value > 0.0))
        throw HypothesisError("ground-state positivity fails: lambda1 = " +
                              format_double(A.lambda.value) + " <= 0");

    // Uniformly-local integrability report for the potential and growth weight.
    const int N = lab.grid.dim;
    double p_exp = std::max(1.0, N / 2.0) + 1.0;
    double r_exp = std::max(N, 2) + 1.0;
    try {
        hyp["uniformly_local_norms"] = {
            {"p", p_exp},
            {"beta_lpu", lpu_norm(lab.coeffs.beta, p_exp)},
            {"r", r_exp},
            {"a_lru", lpu_norm(lab.spec.a, r_exp)}};
    } catch (const ResolutionError& e) {
        hyp["uniformly_local_norms"] = {{"unresolved", e.what()}};
    }

    {
        json crit;
        for (int n_dim : {1, 2, 3})
            crit["N" + std::to_string(n_dim)] =
                to_string(classify_exponent(lab.spec.rhobar, n_dim));
        hyp["criticality"] = crit;
    }

    AuditReport growth = growth_audit(lab.spec, -10.0, 10.0, 64, lab.seed);
    hyp["growth_audit"] = audit_report_to_json(growth);

    if (lab.linear) {
        A.cert.mubar = 1.0;
        A.cert.c = Field(lab.grid, 0.0);
        A.cert.integral_c = 0.0;
        A.cert.provenance = DissipativityCertificate::Provenance::closed_form;
        hyp["dissipativity"] = {{"route", "trivial"}, {"mubar", 1.0}, {"integral_c", 0.0}};
    } else if (cfg.nonlinearity.dissipativity_route == "convexity") {
        if (!cfg.nonlinearity.D)
            throw ConfigError("nonlinearity.D required for the convexity route");
        Field D = cfg.nonlinearity.D->sample(lab.grid);
        std::vector<double> us;
        for (int i = 0; i <= 400; ++i) us.push_back(-10.0 + 20.0 * i / 400.0);
        A.cert = dissipativity_from_convexity(D, cfg.nonlinearity.conv_gamma,
                                              cfg.nonlinearity.conv_nu, lab.spec, us);
        hyp["dissipativity"] = {{"route", "convexity"},
                                {"mubar", A.cert.mubar},
                                {"integral_c", A.cert.integral_c}};
    } else {
        A.cert = dissipativity_constants(lab.spec);
        hyp["dissipativity"] = {{"route", "closed_form"},
                                {"mubar", A.cert.mubar},
                                {"integral_c", A.cert.integral_c}};
    }
    AuditReport diss = dissipativity_audit(lab.spec, A.cert, -10.0, 10.0, 201);
    hyp["dissipativity_audit"] = audit_report_to_json(diss);
    if (!diss.pass())
        throw HypothesisError("dissipativity audit failed: violation " +
                              format_double(diss.max_violation) + " at node " +
                              std::to_string(diss.witness_node) + ", u = " +
                              format_double(diss.witness_u));

    A.rates = select_rates(lab.coeffs, A.lambda.value, A.cert.mubar, cfg.diagnostics.theta);

    ConstantsBundle& b = A.bundle;
    b.lambda1 = A.lambda.value;
    b.mu = A.rates.mu;
    b.delta = A.rates.delta;
    b.nu = A.rates.nu;
    b.mubar = A.cert.mubar;
    b.Cbar = lab.spec.Cbar;
    b.rhobar = lab.spec.rhobar;
    b.taubar = lp_norm(lab.spec.g, 2.0);
    WeightOperatorBounds wob = weight_operator_bounds(lab.coeffs, lab.spec.a);
    b.Lbeta = wob.Lbeta;
    b.La = wob.La;
    b.C2 = embedding_constant(lab.grid, lab.spec.rhobar + 2.0, 4, lab.seed);
    b.C_thetabar = 2.0 * std::sqrt(2.0) * thetabar_profile_deriv_sup();
    b.C_theta = 2.0 * std::sqrt(2.0) * theta_profile_deriv_sup();
    A.coercive_zero = coercive_constants(lab.coeffs, 0.0, A.lambda.value);
    A.coercive_ultimate =
        coercive_constants(lab.coeffs, A.rates.delta * lab.coeffs.alpha1, A.lambda.value);
    b.coercive[0.0] = A.coercive_zero;
    b.coercive[A.rates.delta * lab.coeffs.alpha1] = A.coercive_ultimate;
    b.c_eps_bar = A.coercive_zero.c_eps_bar;
    return A;
}

json bundle_to_json(const ConstantsBundle& b) {
    json j{{"lambda1", b.lambda1}, {"mu", b.mu},         {"delta", b.delta},
           {"nu", b.nu},           {"mubar", b.mubar},   {"Cbar", b.Cbar},
           {"rhobar", b.rhobar},   {"taubar", b.taubar}, {"Lbeta", b.Lbeta},
           {"La", b.La},           {"C2", b.C2},         {"C2_is_estimate", true},
           {"C_theta", b.C_theta}, {"C_thetabar", b.C_thetabar}};
    json map = json::object();
    for (const auto& [eb, c] : b.c_eps_bar) map[format_double(eb)] = c;
    j["c_eps_bar"] = map;
    json co = json::object();
    for (const auto& [kappa, cc] : b.coercive)
        co[format_double(kappa)] = {{"c_low", cc.c_low},
                                    {"C_up", cc.C_up},
                                    {"eps_bar", cc.eps_bar},
                                    {"rho", cc.rho}};
    j["coercive"] = co;
    return j;
}

json tail_report_to_json(const TailReport& r) {
    return json{{"k", r.k},
                {"xi_k", r.xi_k},
                {"zeta_k", r.zeta_k},
                {"c_k", r.c_k},
                {"Mbar", r.Mbar},
                {"Mprime", r.Mprime},
                {"cprime", r.cprime},
                {"cbar", r.cbar},
                {"mode", r.mode == TailReport::Mode::constants ? "constants" : "trajectory"}};
}

void write_json(const std::string& path, const json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const Trajectory& traj,
               const std::vector<std::string>& column_order,
               const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "t";
    for (const auto& name : column_order) out << "," << name;
    for (const auto& [name, _] : extra) out << "," << name;
    out << "\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_double(traj.times[i]);
        for (const auto& name : column_order)
            out << "," << format_double(traj.diagnostics.at(name)[i]);
        for (const auto& [_, col] : extra)
            out << "," << format_double(i < col.size() ? col[i] : nan);
        out << "\n";
    }
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const CheckError& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

namespace {

std::string joined(const std::filesystem::path& dir, const std::string& file) {
    return (dir / file).string();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                         std::optional<std::uint64_t> seed_override,
                         const std::vector<std::string>& check_filter) {
    Lab lab = build_lab(cfg, seed_override);
    Assembled A = audit_and_constants(lab);
    const NonlinearitySpec* spec = lab.linear ? nullptr : &lab.spec;
    const double delta = A.rates.delta, mu = A.rates.mu;
    WeightSet ones = WeightSet::ones(lab.grid);

    // Recorders in the documented CSV column order.
    RecorderList recorders;
    std::vector<std::string> columns;
    auto add = [&](const std::string& name, Recorder fn) {
        recorders.emplace_back(name, std::move(fn));
        columns.push_back(name);
    };
    const CoefficientSet& C = lab.coeffs;
    const NonlinearitySpec& S = lab.spec;
    add("V", [&, delta, mu](const StateZ& z, double) {
        return lyapunov_values(C, &S, z, ones, delta, mu).V;
    });
    add("Vstar", [&, delta, mu](const StateZ& z, double) {
        return lyapunov_values(C, &S, z, ones, delta, mu).Vstar;
    });
    add("eta", [&, delta, mu](const StateZ& z, double) {
        return lyapunov_values(C, &S, z, ones, delta, mu).eta;
    });
    add("w", [&, mu](const StateZ& z, double) { return w_functional(C, z, mu); });
    add("normZ", [](const StateZ& z, double) { return z_norm(z); });
    add("energyNorm", [&](const StateZ& z, double) { return energy_norm(C, z); });
    add("totalEnergy", [&, delta](const StateZ& z, double) { return total_energy(C, z, delta); });
    for (double k : cfg.diagnostics.ks) {
        add("tail_k" + format_double(k),
            [&, k, delta](const StateZ& z, double) { return tail_energy(C, z, k, delta); });
    }

    EvolutionConfig ecfg;
    ecfg.dt = cfg.evolution.dt;
    ecfg.T = cfg.evolution.T;
    ecfg.record_every = cfg.evolution.record_every;
    ecfg.cg_tol = cfg.evolution.cg_tol;
    ecfg.scheme = cfg.evolution.scheme == "lie" ? Scheme::lie : Scheme::strang;
    Trajectory traj = evolve(C, spec, lab.z0, ecfg, recorders);

    double sup_norm = 0.0;
    for (const auto& z : traj.states) sup_norm = std::max(sup_norm, z_norm(z));
    const double R_used = cfg.initial.R_declared.value_or(1.01 * sup_norm);

    json report;
    report["schema"] = "attractor-lab/1";
    report["seed"] = lab.seed;
    report["hypotheses"] = A.hypotheses;
    report["constants"] = bundle_to_json(A.bundle);
    report["R_used"] = R_used;

    json tails_const = json::array(), tails_traj = json::array();
    for (double k : cfg.diagnostics.ks) {
        tails_const.push_back(tail_report_to_json(tail_constants(
            C, spec, A.bundle, A.cert, R_used, k, TailReport::Mode::constants)));
        tails_traj.push_back(tail_report_to_json(tail_constants(
            C, spec, A.bundle, A.cert, R_used, k, TailReport::Mode::trajectory, &lab.z0)));
    }
    report["tail_reports"] = {{"constants_mode", tails_const}, {"trajectory_mode", tails_traj}};

    std::vector<std::string> checks =
        !check_filter.empty()
            ? check_filter
            : (!cfg.diagnostics.checks.empty()
                   ? cfg.diagnostics.checks
                   : std::vector<std::string>{"decay", "identities", "eta", "tails", "ultimate"});

    json verdicts = json::array();
    std::vector<std::pair<std::string, std::vector<double>>> extra_columns;
    bool all_pass = true;
    auto push_verdict = [&](const std::string& name, bool pass, json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        verdicts.push_back(detail);
        all_pass = all_pass && pass;
    };

    for (const std::string& check : checks) {
        if (check == "decay") {
            DecayReport d = linear_decay_check(C, lab.z0, cfg.evolution.T, cfg.evolution.dt, mu,
                                               0.02, std::max(1, cfg.evolution.record_every),
                                               cfg.evolution.cg_tol);
            push_verdict("decay", d.pass,
                         {{"max_ratio", d.max_ratio},
                          {"mu", d.mu},
                          {"empirical_M_z", d.empirical_M_z}});
        } else if (check == "nemitski") {
            // Inequality suite on seeded random states; the dual-norm estimate
            // is reported as the worst ratio over the sample set.
            Rng rng(lab.seed ^ 0x6e656d69u);
            double min_slack = std::numeric_limits<double>::infinity();
            double max_ratio = 0.0, max_scale = 1.0;
            for (int trial = 0; trial < 20; ++trial) {
                Field u(lab.grid), h(lab.grid);
                for (auto& x : u.v) x = rng.symmetric();
                for (auto& x : h.v) x = rng.symmetric();
                EstimateSuiteReport rep =
                    estimate_suite(S, C, u, h, std::max(lab.grid.dim, 2) + 1.0);
                min_slack = std::min(min_slack, rep.min_determinate_slack);
                max_ratio = std::max(max_ratio, rep.critical_ratio);
                max_scale = std::max(max_scale, 1.0 + lp_norm(u, 2.0) + lp_norm(h, 2.0));
            }
            push_verdict("nemitski", min_slack >= -1e-12 * max_scale,
                         {{"min_slack", min_slack}, {"max_critical_ratio", max_ratio}});
        } else if (check == "identities") {
            IdentityReport e = energy_identity_check(traj, C, spec, ones, delta);
            IdentityReport vs = vstar_derivative_check(traj, spec, ones);
            IdentityReport ball = ball_energy_check(traj, C, spec, delta);
            double tol = cfg.diagnostics.identity_rel_tol;
            bool pass = e.max_residual <= tol * e.scale && vs.max_residual <= tol * vs.scale &&
                        ball.max_residual <= tol * ball.scale;
            push_verdict("identities", pass,
                         {{"energy_identity", {{"max_residual", e.max_residual}, {"scale", e.scale}}},
                          {"vstar_derivative",
                           {{"max_residual", vs.max_residual}, {"scale", vs.scale}}},
                          {"ball_energy",
                           {{"max_residual", ball.max_residual}, {"scale", ball.scale}}}});
        } else if (check == "eta") {
            std::vector<WeightSet> sets;
            sets.push_back(ones);
            if (cfg.diagnostics.weights == "cutoff")
                for (double k : cfg.diagnostics.ks)
                    sets.push_back(WeightSet::cutoff_at(lab.grid, k));
            bool pass = true;
            json detail = json::array();
            for (const auto& wset : sets) {
                double tol = discrete_tolerance(traj, C, spec, wset, delta);
                EtaReport rep = eta_inequality_check(traj, C, spec, wset, A.rates, A.cert, tol);
                pass = pass && rep.pass;
                std::string label = wset.kind == WeightSet::Kind::ones
                                        ? "ones"
                                        : "cutoff_k" + format_double(wset.k);
                detail.push_back({{"weights", label},
                                  {"min_slack", rep.min_slack},
                                  {"tol", rep.tol},
                                  {"pass", rep.pass}});
                if (wset.kind == WeightSet::Kind::ones) {
                    std::vector<double> col(traj.times.size(),
                                            std::numeric_limits<double>::quiet_NaN());
                    for (std::size_t i = 0; i < rep.slacks.size(); ++i) col[i + 1] = rep.slacks[i];
                    extra_columns.emplace_back("slack_eta", std::move(col));
                }
            }
            push_verdict("eta", pass, {{"weights", detail}});
        } else if (check == "tails") {
            if (cfg.diagnostics.ks.empty())
                throw ConfigError("tails check: diagnostics.ks must list cutoff radii");
            double tol = discrete_tolerance(traj, C, spec, ones, delta);
            TailBoundReport rep = tail_bound_check(traj, C, spec, A.bundle, A.cert, R_used,
                                                   cfg.diagnostics.ks, tol);
            json per_k = json::array();
            for (const auto& pk : rep.per_k)
                per_k.push_back({{"k", pk.k},
                                 {"max_excess", pk.max_excess},
                                 {"witness_t", pk.witness_t},
                                 {"constants", tail_report_to_json(pk.constants)}});
            push_verdict("tails", rep.pass,
                         {{"per_k", per_k},
                          {"total_max_excess", rep.total_max_excess},
                          {"total_witness_t", rep.total_witness_t},
                          {"tol", rep.tol},
                          {"R_used", rep.R_used}});
        } else if (check == "ultimate") {
            TailReport tr = tail_constants(C, spec, A.bundle, A.cert, R_used,
                                           std::max(1.0, lab.grid.half_width / 4.0),
                                           TailReport::Mode::trajectory, &lab.z0);
            double Rinf = ultimate_bound(C, tr.cprime, A.coercive_ultimate.c_low);
            double bound = 1.1 * Rinf;
            std::size_t idx = traj.states.size();
            for (std::size_t i = traj.states.size(); i-- > 0;) {
                if (z_norm(traj.states[i]) <= bound)
                    idx = i;
                else
                    break;
            }
            bool pass = idx < traj.states.size();
            double T_star = pass ? traj.times[idx] : std::numeric_limits<double>::infinity();
            push_verdict("ultimate", pass,
                         {{"R_infinity", Rinf},
                          {"cprime", tr.cprime},
                          {"c_low", A.coercive_ultimate.c_low},
                          {"T_star", T_star}});
        } else if (check == "ygrowth") {
            YGrowthReport yg = y_growth_probe(C, {lab.z0}, std::min(cfg.evolution.T, 5.0),
                                              cfg.evolution.dt, cfg.evolution.cg_tol);
            push_verdict("ygrowth", true, {{"C1", yg.C1}, {"C2", yg.C2}});
        } else {
            throw ConfigError("unknown check '" + check + "'");
        }
    }

    report["checks"] = verdicts;
    RunResult result;
    result.exit_code = all_pass ? 0 : 3;
    report["exit_code"] = result.exit_code;
    result.report = report;

    std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    write_csv(joined(dir, cfg.output.csv_path), traj, columns, extra_columns);
    write_json(joined(dir, cfg.output.json_path), report);
    return result;
}

RunResult run_hypotheses(const ExperimentConfig& cfg, const std::string& out_dir,
                         std::optional<std::uint64_t> seed) {
    Lab lab = build_lab(cfg, seed);
    Assembled A = audit_and_constants(lab);
    json report{{"schema", "attractor-lab/1"},
                {"seed", lab.seed},
                {"hypotheses", A.hypotheses},
                {"rates", {{"mu", A.rates.mu}, {"delta", A.rates.delta}, {"nu", A.rates.nu}}},
                {"exit_code", 0}};
    write_json(joined(out_dir.empty() ? "." : out_dir, cfg.output.json_path), report);
    return {0, report};
}

RunResult run_lambda1(const ExperimentConfig& cfg, const std::string& out_dir,
                      std::optional<std::uint64_t> seed) {
    Lab lab = build_lab(cfg, seed);
    EigenResult eig = principal_eigenvalue(lab.coeffs, 1e-10);
    double rayleigh = energy_form(lab.coeffs, eig.field, eig.field) /
                      l2_inner(eig.field, eig.field);
    json report{{"schema", "attractor-lab/1"},
                {"seed", lab.seed},
                {"lambda1", eig.value},
                {"rayleigh", rayleigh},
                {"iterations", eig.iterations},
                {"h", lab.grid.h},
                {"exit_code", 0}};
    write_json(joined(out_dir.empty() ? "." : out_dir, cfg.output.json_path), report);
    return {0, report};
}

RunResult run_constants(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::optional<std::uint64_t> seed) {
    Lab lab = build_lab(cfg, seed);
    Assembled A = audit_and_constants(lab);
    const NonlinearitySpec* spec = lab.linear ? nullptr : &lab.spec;
    double R = cfg.initial.R_declared.value_or(1.01 * z_norm(lab.z0));
    json tails_const = json::array(), tails_traj = json::array();
    for (double k : cfg.diagnostics.ks) {
        tails_const.push_back(tail_report_to_json(tail_constants(
            lab.coeffs, spec, A.bundle, A.cert, R, k, TailReport::Mode::constants)));
        tails_traj.push_back(tail_report_to_json(tail_constants(
            lab.coeffs, spec, A.bundle, A.cert, R, k, TailReport::Mode::trajectory, &lab.z0)));
    }
    json report{{"schema", "attractor-lab/1"},
                {"seed", lab.seed},
                {"hypotheses", A.hypotheses},
                {"constants", bundle_to_json(A.bundle)},
                {"R_used", R},
                {"tail_reports",
                 {{"constants_mode", tails_const}, {"trajectory_mode", tails_traj}}},
                {"exit_code", 0}};
    write_json(joined(out_dir.empty() ? "." : out_dir, cfg.output.json_path), report);
    return {0, report};
}

RunResult run_dissipativity(const ExperimentConfig& cfg, const std::string& out_dir,
                            std::optional<std::uint64_t> seed) {
    Lab lab = build_lab(cfg, seed);
    AuditReport growth = growth_audit(lab.spec, -10.0, 10.0, 64, lab.seed);
    DissipativityCertificate cert;
    json route;
    if (lab.linear) {
        cert.mubar = 1.0;
        cert.c = Field(lab.grid, 0.0);
        route = "trivial";
    } else if (cfg.nonlinearity.dissipativity_route == "convexity") {
        if (!cfg.nonlinearity.D)
            throw ConfigError("nonlinearity.D required for the convexity route");
        std::vector<double> us;
        for (int i = 0; i <= 400; ++i) us.push_back(-10.0 + 20.0 * i / 400.0);
        cert = dissipativity_from_convexity(cfg.nonlinearity.D->sample(lab.grid),
                                            cfg.nonlinearity.conv_gamma, cfg.nonlinearity.conv_nu,
                                            lab.spec, us);
        route = "convexity";
    } else {
        cert = dissipativity_constants(lab.spec);
        route = "closed_form";
    }
    AuditReport audit = dissipativity_audit(lab.spec, cert, -10.0, 10.0, 201);
    json report{{"schema", "attractor-lab/1"},
                {"seed", lab.seed},
                {"growth_audit", audit_report_to_json(growth)},
                {"dissipativity",
                 {{"route", route},
                  {"mubar", cert.mubar},
                  {"integral_c", cert.integral_c},
                  {"audit", audit_report_to_json(audit)}}},
                {"exit_code", 0}};
    write_json(joined(out_dir.empty() ? "." : out_dir, cfg.output.json_path), report);
    return {0, report};
}

}  // namespace attractorlab
