#include "attractorlab/semiflow.hpp"

#include <cmath>

#include "attractorlab/linalg.hpp"
#include "attractorlab/numfmt.hpp"

namespace attractorlab {

double energy_norm(const CoefficientSet& c, const StateZ& z) {
    double q = h1_inner(c, z.u, z.u) + l2_inner(z.v, z.v);
    return std::sqrt(std::max(0.0, q));
}

double z_norm(const StateZ& z) {
    StaggeredField g = gradient(z.u);
    return std::sqrt(staggered_inner(g, g) + l2_inner(z.u, z.u) + l2_inner(z.v, z.v));
}

StateZ linear_step(const CoefficientSet& c, const StateZ& z, double dt, double cg_tol) {
    require_same_grid(c.grid, z.u.grid, "linear_step");
    if (dt == 0.0 || !std::isfinite(dt)) throw ConfigError("linear_step: need dt != 0");
    const std::size_t n = c.grid.size();
    const double a = 0.5 * dt;
    const double eps = c.eps;

    std::vector<double> su(n);
    apply_S(c, z.u.v, su);  // beta u - L u

    // r_u = u + a v;  r_v = v - (a/eps)(alpha v + S u)
    std::vector<double> ru(n), rv(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        ru[i] = z.u.v[i] + a * z.v.v[i];
        rv[i] = z.v.v[i] - (a / eps) * (c.alpha.v[i] * z.v.v[i] + su[i]);
        rhs[i] = eps * a * rv[i] + (eps + a * c.alpha.v[i]) * ru[i];
    }
    // Schur complement M = diag(eps + a alpha) + a^2 S, SPD for lambda1 > 0.
    MatVec M = [&](const std::vector<double>& x, std::vector<double>& y) {
        apply_S(c, x, y);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = (eps + a * c.alpha.v[i]) * x[i] + a * a * y[i];
    };
    // The back-substitution multiplies solver error by up to a*|S|/eps, so the
    // inner tolerance absorbs that amplification.
    double amplification = 1.0 + std::abs(a) * c.stationary_norm_bound() / eps;
    double tol_eff = std::max(1e-15, cg_tol / amplification);
    StateZ out(c.grid);
    out.u.v = z.u.v;  // warm start
    CgResult cg = cg_solve(M, rhs, out.u.v, tol_eff, 500000);
    if (!cg.converged)
        throw NumericalError("linear_step: CG stalled at residual " +
                             format_double(cg.relative_residual));
    // v' = (r_v - (a/eps) S u') / (1 + a alpha/eps); equivalent to
    // (u' - r_u)/a but does not divide solver error by a.
    apply_S(c, out.u.v, su);
    for (std::size_t i = 0; i < n; ++i)
        out.v.v[i] = (rv[i] - (a / eps) * su[i]) / (1.0 + a * c.alpha.v[i] / eps);

    if (dt > 0.0) {  // backward steps of a damped group legitimately expand
        double before = h1_inner(c, z.u, z.u) + l2_inner(z.v, z.v);
        double after = h1_inner(c, out.u, out.u) + l2_inner(out.v, out.v);
        if (after > before * (1.0 + 1e-9))
            throw NumericalError("linear_step: energy contraction violated (" +
                                 format_double(after) + " > " + format_double(before) + ")");
    }
    return out;
}

namespace {
void kick(const CoefficientSet& c, const NonlinearitySpec& spec, StateZ& z, double dt) {
    for (std::size_t i = 0; i < z.u.size(); ++i)
        z.v.v[i] += dt * spec.f(i, z.u.v[i]) / c.eps;
}
}  // namespace

StateZ semiflow_step(const CoefficientSet& c, const NonlinearitySpec& spec, const StateZ& z,
                     double dt, double cg_tol, Scheme scheme) {
    require_same_grid(c.grid, spec.grid, "semiflow_step");
    if (scheme == Scheme::lie) {
        StateZ out = linear_step(c, z, dt, cg_tol);
        kick(c, spec, out, dt);
        return out;
    }
    StateZ out = linear_step(c, z, 0.5 * dt, cg_tol);
    kick(c, spec, out, dt);
    return linear_step(c, out, 0.5 * dt, cg_tol);
}

Trajectory evolve(const CoefficientSet& c, const NonlinearitySpec* spec, const StateZ& z0,
                  const EvolutionConfig& cfg, const RecorderList& recorders) {
    require_same_grid(c.grid, z0.u.grid, "evolve");
    if (!(cfg.dt > 0.0)) throw ConfigError("evolve: need dt > 0");
    if (cfg.T < 0.0) throw ConfigError("evolve: need T >= 0");
    if (cfg.record_every < 1) throw ConfigError("evolve: need record_every >= 1");
    const long long steps = std::llround(cfg.T / cfg.dt);

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.record_every = cfg.record_every;
    for (const auto& [name, fn] : recorders) traj.diagnostics[name] = {};

    StateZ z = z0;
    double last_finite_t = 0.0;
    auto record = [&](long long step) {
        double t = step * cfg.dt;
        traj.times.push_back(t);
        traj.states.push_back(z);
        for (const auto& [name, fn] : recorders) traj.diagnostics[name].push_back(fn(z, t));
    };
    auto check_state = [&](long long step) {
        double t = step * cfg.dt;
        double norm = z_norm(z);
        if (!std::isfinite(norm) || norm > cfg.blowup_threshold)
            throw NumericalError("evolve: blow-up detected at t = " + format_double(t) +
                                 " (|z|_Z = " + format_double(norm) +
                                 "), last finite t = " + format_double(last_finite_t));
        last_finite_t = t;
    };
    check_state(0);
    record(0);
    for (long long s = 1; s <= steps; ++s) {
        z = spec ? semiflow_step(c, *spec, z, cfg.dt, cfg.cg_tol, cfg.scheme)
                 : linear_step(c, z, cfg.dt, cfg.cg_tol);
        check_state(s);
        if (s % cfg.record_every == 0) record(s);
    }
    return traj;
}

DecayReport linear_decay_check(const CoefficientSet& c, const StateZ& z0, double T, double dt,
                               double mu, double tol, int record_every, double cg_tol) {
    if (!(c.alpha0 > 0.0))
        throw HypothesisError("linear_decay_check: undamped system (alpha0 <= 0)");
    double base = energy_norm(c, z0);
    DecayReport rep;
    rep.mu = mu;
    if (base == 0.0) {
        rep.max_ratio = 0.0;
        rep.pass = true;
        return rep;
    }
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.record_every = record_every;
    cfg.cg_tol = cg_tol;
    Trajectory traj = evolve(c, nullptr, z0, cfg);
    double worst = 0.0, worst_z = 0.0;
    double base_z = z_norm(z0);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double decay = std::exp(-mu * traj.times[i]);
        worst = std::max(worst, energy_norm(c, traj.states[i]) / (2.0 * decay * base));
        if (base_z > 0.0)
            worst_z = std::max(worst_z, z_norm(traj.states[i]) / (decay * base_z));
    }
    rep.max_ratio = worst;
    rep.empirical_M_z = worst_z;
    rep.pass = worst <= 1.0 + tol;
    return rep;
}

double mild_residual(const CoefficientSet& c, const NonlinearitySpec* spec,
                     const Trajectory& traj, std::size_t t_index, int quad_panels,
                     double cg_tol) {
    if (t_index >= traj.times.size())
        throw ConfigError("mild_residual: t_index beyond recorded range");
    if (t_index == 0) return 0.0;
    if (quad_panels < 1 || t_index % static_cast<std::size_t>(quad_panels) != 0)
        throw ConfigError("mild_residual: quad_panels must divide t_index");
    const std::size_t stride = t_index / static_cast<std::size_t>(quad_panels);
    const double eps = c.eps;

    auto advance = [&](StateZ z, std::size_t records) {
        long long fine = static_cast<long long>(records) * traj.record_every;
        for (long long s = 0; s < fine; ++s) z = linear_step(c, z, traj.dt, cg_tol);
        return z;
    };

    StateZ acc = advance(traj.states.front(), t_index);
    if (spec) {
        const double panel_dt = stride * traj.record_every * traj.dt;
        for (std::size_t j = 0; j <= t_index; j += stride) {
            const StateZ& zj = traj.states[j];
            StateZ phi(c.grid);
            for (std::size_t i = 0; i < phi.u.size(); ++i)
                phi.v.v[i] = spec->f(i, zj.u.v[i]) / eps;
            StateZ prop = advance(phi, t_index - j);
            double w = (j == 0 || j == t_index) ? 0.5 * panel_dt : panel_dt;
            for (std::size_t i = 0; i < acc.u.size(); ++i) {
                acc.u.v[i] += w * prop.u.v[i];
                acc.v.v[i] += w * prop.v.v[i];
            }
        }
    }
    StateZ diff(c.grid);
    const StateZ& zt = traj.states[t_index];
    for (std::size_t i = 0; i < diff.u.size(); ++i) {
        diff.u.v[i] = zt.u.v[i] - acc.u.v[i];
        diff.v.v[i] = zt.v.v[i] - acc.v.v[i];
    }
    return z_norm(diff);
}

}  // namespace attractorlab
