#include "attractorlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "attractorlab/linalg.hpp"
#include "attractorlab/numfmt.hpp"
#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace {

void finalize_bounds(CoefficientSet& c) {
    double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min;
    for (int d = 0; d < c.grid.dim; ++d)
        for (double v : c.a.axis[d]) {
            a_min = std::min(a_min, v);
            a_max = std::max(a_max, v);
        }
    c.a0 = a_min;
    c.a1 = a_max;
    if (!(c.a0 > 0.0))
        throw HypothesisError("ellipticity violated: min interface coefficient " +
                              format_double(c.a0) + " is not positive");
    double al_min = std::numeric_limits<double>::infinity(), al_max = -al_min;
    for (double v : c.alpha.v) {
        al_min = std::min(al_min, v);
        al_max = std::max(al_max, v);
    }
    c.alpha0 = al_min;
    c.alpha1 = al_max;
    if (c.alpha0 < 0.0)
        throw HypothesisError("damping sign violated: min alpha = " + format_double(c.alpha0));
    if (!(c.eps > 0.0)) throw ConfigError("make_coefficients: eps must be positive");
    c.beta_abs_max = 0.0;
    for (double v : c.beta.v) c.beta_abs_max = std::max(c.beta_abs_max, std::abs(v));
}

// Applies -div(w grad u) + diag*u on raw coefficient vectors; w defaults to
// the unit coefficient when null. This is the one stencil everything shares.
void stencil_apply(const Grid& g, const StaggeredField* w, const double* diag,
                   const std::vector<double>& u, std::vector<double>& out) {
    const double inv_h2 = 1.0 / (g.h * g.h);
    const int n = g.n;
    if (g.dim == 1) {
        for (int m = 0; m < n; ++m) {
            double ul = m == 0 ? 0.0 : u[m - 1];
            double ur = m == n - 1 ? 0.0 : u[m + 1];
            double al = w ? w->axis[0][m] : 1.0;
            double ar = w ? w->axis[0][m + 1] : 1.0;
            double lap = (ar * (ur - u[m]) - al * (u[m] - ul)) * inv_h2;
            out[m] = -lap + (diag ? diag[m] * u[m] : 0.0);
        }
    } else {
        for (int mx = 0; mx < n; ++mx)
            for (int my = 0; my < n; ++my) {
                std::size_t id = static_cast<std::size_t>(mx) * n + my;
                double uc = u[id];
                double uxl = mx == 0 ? 0.0 : u[id - n];
                double uxr = mx == n - 1 ? 0.0 : u[id + n];
                double uyl = my == 0 ? 0.0 : u[id - 1];
                double uyr = my == n - 1 ? 0.0 : u[id + 1];
                double axl = w ? w->axis[0][static_cast<std::size_t>(mx) * n + my] : 1.0;
                double axr = w ? w->axis[0][static_cast<std::size_t>(mx + 1) * n + my] : 1.0;
                double ayl = w ? w->axis[1][static_cast<std::size_t>(mx) * (n + 1) + my] : 1.0;
                double ayr = w ? w->axis[1][static_cast<std::size_t>(mx) * (n + 1) + my + 1] : 1.0;
                double lap = (axr * (uxr - uc) - axl * (uc - uxl)) * inv_h2 +
                             (ayr * (uyr - uc) - ayl * (uc - uyl)) * inv_h2;
                out[id] = -lap + (diag ? diag[id] * uc : 0.0);
            }
    }
}

struct Gershgorin {
    double lo = 0.0;
    double hi = 0.0;
};

// Row bounds for -div(w grad .) + diag. Off-diagonal entries couple interior
// neighbors only; fluxes into the boundary stay on the diagonal.
Gershgorin gershgorin_bounds(const Grid& g, const StaggeredField* w, const double* diag,
                             double w_scale) {
    const double inv_h2 = 1.0 / (g.h * g.h);
    const int n = g.n;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto coeff = [&](int axis, std::size_t idx) {
        return w_scale * (w ? w->axis[axis][idx] : 1.0);
    };
    if (g.dim == 1) {
        for (int m = 0; m < n; ++m) {
            double al = coeff(0, m), ar = coeff(0, m + 1);
            double d = (al + ar) * inv_h2 + (diag ? diag[m] : 0.0);
            double off = ((m > 0 ? std::abs(al) : 0.0) + (m < n - 1 ? std::abs(ar) : 0.0)) * inv_h2;
            lo = std::min(lo, d - off);
            hi = std::max(hi, d + off);
        }
    } else {
        for (int mx = 0; mx < n; ++mx)
            for (int my = 0; my < n; ++my) {
                std::size_t id = static_cast<std::size_t>(mx) * n + my;
                double axl = coeff(0, static_cast<std::size_t>(mx) * n + my);
                double axr = coeff(0, static_cast<std::size_t>(mx + 1) * n + my);
                double ayl = coeff(1, static_cast<std::size_t>(mx) * (n + 1) + my);
                double ayr = coeff(1, static_cast<std::size_t>(mx) * (n + 1) + my + 1);
                double d = (axl + axr + ayl + ayr) * inv_h2 + (diag ? diag[id] : 0.0);
                double off = ((mx > 0 ? std::abs(axl) : 0.0) + (mx < n - 1 ? std::abs(axr) : 0.0) +
                              (my > 0 ? std::abs(ayl) : 0.0) + (my < n - 1 ? std::abs(ayr) : 0.0)) *
                             inv_h2;
                lo = std::min(lo, d - off);
                hi = std::max(hi, d + off);
            }
    }
    return {lo, hi};
}

std::vector<double> seeded_start(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.symmetric() + 0.01;
    double norm = std::sqrt(dot(x, x));
    for (auto& v : x) v /= norm;
    return x;
}

}  // namespace

CoefficientSet make_coefficients(const Grid& g, double eps,
                                 const std::function<double(double, double)>& alpha_fn,
                                 const std::function<double(double, double)>& beta_fn,
                                 const std::function<double(int, double, double)>& a_fn) {
    CoefficientSet c;
    c.grid = g;
    c.eps = eps;
    c.alpha = make_field(g, alpha_fn);
    c.beta = make_field(g, beta_fn);
    c.a = make_staggered(g, a_fn);
    finalize_bounds(c);
    return c;
}

CoefficientSet make_coefficients(const Grid& g, double eps, Field alpha, Field beta,
                                 const Field& a_nodes) {
    require_same_grid(g, alpha.grid, "make_coefficients");
    require_same_grid(g, beta.grid, "make_coefficients");
    require_same_grid(g, a_nodes.grid, "make_coefficients");
    CoefficientSet c;
    c.grid = g;
    c.eps = eps;
    c.alpha = std::move(alpha);
    c.beta = std::move(beta);
    c.a = StaggeredField(g);
    const int n = g.n;
    auto node = [&](int mx, int my) {
        return a_nodes.v[g.dim == 1 ? static_cast<std::size_t>(mx)
                                    : static_cast<std::size_t>(mx) * n + my];
    };
    if (g.dim == 1) {
        for (int i = 0; i <= n; ++i) {
            double left = node(std::max(0, i - 1), 0);
            double right = node(std::min(n - 1, i), 0);
            c.a.axis[0][i] = 0.5 * (left + right);
        }
    } else {
        for (int ix = 0; ix <= n; ++ix)
            for (int my = 0; my < n; ++my) {
                double left = node(std::max(0, ix - 1), my);
                double right = node(std::min(n - 1, ix), my);
                c.a.axis[0][static_cast<std::size_t>(ix) * n + my] = 0.5 * (left + right);
            }
        for (int mx = 0; mx < n; ++mx)
            for (int iy = 0; iy <= n; ++iy) {
                double left = node(mx, std::max(0, iy - 1));
                double right = node(mx, std::min(n - 1, iy));
                c.a.axis[1][static_cast<std::size_t>(mx) * (n + 1) + iy] = 0.5 * (left + right);
            }
    }
    finalize_bounds(c);
    return c;
}

CoefficientSet make_coefficients(const Grid& g, double eps, Field alpha, Field beta,
                                 StaggeredField a) {
    require_same_grid(g, alpha.grid, "make_coefficients");
    require_same_grid(g, beta.grid, "make_coefficients");
    require_same_grid(g, a.grid, "make_coefficients");
    CoefficientSet c;
    c.grid = g;
    c.eps = eps;
    c.alpha = std::move(alpha);
    c.beta = std::move(beta);
    c.a = std::move(a);
    finalize_bounds(c);
    return c;
}

Field apply_elliptic(const CoefficientSet& c, const Field& u) {
    require_same_grid(c.grid, u.grid, "apply_elliptic");
    Field out(c.grid);
    stencil_apply(c.grid, &c.a, nullptr, u.v, out.v);
    for (auto& v : out.v) v = -v;  // stencil_apply returns -div(a grad u)
    return out;
}

void apply_S(const CoefficientSet& c, const std::vector<double>& x, std::vector<double>& y) {
    stencil_apply(c.grid, &c.a, c.beta.v.data(), x, y);
}

double energy_form(const CoefficientSet& c, const Field& u, const Field& w) {
    require_same_grid(c.grid, u.grid, "energy_form");
    require_same_grid(c.grid, w.grid, "energy_form");
    StaggeredField gu = gradient(u);
    StaggeredField gw = gradient(w);
    double grad_part = staggered_inner_weighted(c.a, gu, gw);
    double beta_part = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) beta_part += c.beta.v[i] * u.v[i] * w.v[i];
    double cell = c.grid.dim == 1 ? c.grid.h : c.grid.h * c.grid.h;
    return grad_part + cell * beta_part;
}

double h1_inner(const CoefficientSet& c, const Field& u, const Field& w) {
    return energy_form(c, u, w) / c.eps;
}

EigenResult principal_eigenvalue(const CoefficientSet& c, double tol, int max_outer) {
    const std::size_t n = c.grid.size();
    MatVec S = [&](const std::vector<double>& x, std::vector<double>& y) {
        stencil_apply(c.grid, &c.a, c.beta.v.data(), x, y);
    };
    // Shift to just below the Gershgorin floor: keeps the shifted operator
    // certified positive definite and restores the spectral gap ratio when a
    // large constant potential crowds the bottom of the spectrum.
    Gershgorin gb = gershgorin_bounds(c.grid, &c.a, c.beta.v.data(), 1.0);
    double scale = std::max({std::abs(gb.lo), std::abs(gb.hi), 1.0});
    double shift = -gb.lo + 1e-6 * scale;
    MatVec Ssh = [&](const std::vector<double>& x, std::vector<double>& y) {
        S(x, y);
        if (shift != 0.0)
            for (std::size_t i = 0; i < x.size(); ++i) y[i] += shift * x[i];
    };

    std::vector<double> x = seeded_start(n, 0x5eed0001u), y(n), sy(n);
    double lam = 0.0;
    bool have_lam = false;
    const double cg_tol = std::max(1e-14, 1e-3 * tol);
    const int cg_max = 200000;
    for (int outer = 1; outer <= max_outer; ++outer) {
        y = x;
        CgResult cg = cg_solve(Ssh, x, y, cg_tol, cg_max);
        if (!cg.converged)
            throw NumericalError("principal_eigenvalue: inner CG stalled (residual " +
                                 format_double(cg.relative_residual) + ")");
        double norm = std::sqrt(dot(y, y));
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NumericalError("principal_eigenvalue: iterate collapsed");
        for (auto& v : y) v /= norm;
        Ssh(y, sy);
        double lam_new = dot(sy, y);
        if (have_lam && std::abs(lam_new - lam) <=
                            tol * std::max(std::abs(lam_new), 1e-300)) {
            Field f(c.grid);
            f.v = y;
            return {lam_new - shift, std::move(f), outer};
        }
        lam = lam_new;
        have_lam = true;
        x = y;
    }
    throw NumericalError("principal_eigenvalue: no convergence after " +
                         std::to_string(max_outer) + " iterations; best Ritz value " +
                         format_double(lam - shift));
}

double form_bound_constant(const CoefficientSet& c, double eps_bar, double tol, int max_iters) {
    if (eps_bar < 0.0) throw ConfigError("form_bound_constant: eps_bar must be >= 0");
    const std::size_t n = c.grid.size();
    std::vector<double> abs_beta(n);
    double beta_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        abs_beta[i] = std::abs(c.beta.v[i]);
        beta_max = std::max(beta_max, abs_beta[i]);
    }
    if (eps_bar == 0.0) return beta_max;
    if (beta_max == 0.0) return 0.0;

    // T = diag(|beta|) - eps_bar (K1 + I) with K1 the unit-coefficient stencil.
    MatVec T = [&](const std::vector<double>& x, std::vector<double>& y) {
        stencil_apply(c.grid, nullptr, nullptr, x, y);
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = abs_beta[i] * x[i] - eps_bar * (y[i] + x[i]);
    };
    std::vector<double> diag_T(n);
    {
        // Gershgorin of T assembled from the pieces: unit stencil scaled by
        // -eps_bar plus the diagonal |beta| - eps_bar.
        for (std::size_t i = 0; i < n; ++i) diag_T[i] = abs_beta[i] - eps_bar;
    }
    Gershgorin gb = gershgorin_bounds(c.grid, nullptr, diag_T.data(), -eps_bar);
    if (gb.hi <= 0.0) return 0.0;  // certified: the form is dominated without any C
    double shift = std::max(0.0, -gb.lo);

    std::vector<double> v = seeded_start(n, 0x5eed0002u), tv(n);
    double rho = 0.0;
    bool have_rho = false;
    for (int it = 1; it <= max_iters; ++it) {
        T(v, tv);
        double rho_new = dot(tv, v);  // v is unit
        if (have_rho && std::abs(rho_new - rho) <= tol * std::max(1.0, std::abs(rho_new)))
            return std::max(0.0, rho_new);
        rho = rho_new;
        have_rho = true;
        if (shift != 0.0)
            for (std::size_t i = 0; i < n; ++i) tv[i] += shift * v[i];
        double norm = std::sqrt(dot(tv, tv));
        if (norm == 0.0) return std::max(0.0, rho);
        for (std::size_t i = 0; i < n; ++i) v[i] = tv[i] / norm;
    }
    // Clustered spectrum (near-constant beta with small eps_bar): the power
    // iteration cannot resolve the top of the cluster. Fall back to the
    // certified upper bound max|beta| - eps_bar (1 + min eig of the unit
    // stencil), exact for constant beta; any upper bound keeps the form
    // inequality valid.
    CoefficientSet unit;
    unit.grid = c.grid;
    unit.eps = 1.0;
    unit.alpha = Field(c.grid, 0.0);
    unit.beta = Field(c.grid, 0.0);
    unit.a = StaggeredField(c.grid, 1.0);
    unit.a0 = unit.a1 = 1.0;
    double lam_min_unit = principal_eigenvalue(unit, 1e-10).value;
    double weyl = beta_max - eps_bar * (1.0 + lam_min_unit);
    return std::max(0.0, std::min(gb.hi, weyl));
}

std::vector<double> eps_bar_search_set(double a0) {
    std::vector<double> scales = {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2,
                                  0.05, 0.1,  0.2,  0.3,  0.4,  0.5,  0.6,
                                  0.7,  0.8,  0.9};
    for (auto& s : scales) s *= a0;
    return scales;
}

CoerciveConstants coercive_constants(const CoefficientSet& c, double kappa, double lambda1) {
    if (!(kappa >= 0.0) || !(kappa < lambda1))
        throw HypothesisError("coercive_constants: need 0 <= kappa < lambda1 (kappa = " +
                              format_double(kappa) + ", lambda1 = " + format_double(lambda1) +
                              ")");
    CoerciveConstants best;
    best.kappa = kappa;
    best.c_low = -std::numeric_limits<double>::infinity();
    for (double eb : eps_bar_search_set(c.a0)) {
        if (!(eb < c.a0)) continue;
        double C_eb = form_bound_constant(c, eb);
        best.c_eps_bar[eb] = C_eb;
        for (int r = 1; r <= 19; ++r) {
            double rho = 0.05 * r;
            double cand = std::min(rho * (c.a0 - eb),
                                   (1.0 - rho) * (lambda1 - kappa) -
                                       rho * (eb + C_eb + kappa));
            if (cand > best.c_low) {
                best.c_low = cand;
                best.eps_bar = eb;
                best.rho = rho;
                best.C_up = std::max(c.a1 + eb, eb + C_eb);
            }
        }
    }
    if (!(best.c_low > 0.0))
        throw HypothesisError("coercive_constants: no positive coercivity constant found "
                              "(best = " + format_double(best.c_low) + ")");
    return best;
}

namespace {

double pencil_top_eigenvalue(const Grid& g, const std::vector<double>& weight, double tol,
                             int max_iters) {
    const std::size_t n = g.size();
    double w_max = 0.0;
    for (double w : weight) w_max = std::max(w_max, w);
    if (w_max == 0.0) return 0.0;
    MatVec KI = [&](const std::vector<double>& x, std::vector<double>& y) {
        stencil_apply(g, nullptr, nullptr, x, y);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] += x[i];
    };
    std::vector<double> v = seeded_start(n, 0x5eed0003u), dv(n), y(n), kiv(n);
    double rho = 0.0;
    bool have_rho = false;
    for (int it = 1; it <= max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) dv[i] = weight[i] * v[i];
        KI(v, kiv);
        double denom = dot(kiv, v);
        double rho_new = dot(dv, v) / denom;
        if (have_rho && std::abs(rho_new - rho) <= tol * std::max(rho_new, 1e-300))
            return std::max(0.0, rho_new);
        rho = rho_new;
        have_rho = true;
        y = v;
        CgResult cg = cg_solve(KI, dv, y, 1e-12, 200000);
        if (!cg.converged) throw NumericalError("pencil iteration: CG stalled");
        double norm = std::sqrt(dot(y, y));
        if (norm == 0.0) return std::max(0.0, rho);
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / norm;
    }
    throw NumericalError("pencil iteration: no convergence (last " + format_double(rho) + ")");
}

}  // namespace

WeightOperatorBounds weight_operator_bounds(const CoefficientSet& c, const Field& a_field,
                                            double tol, int max_iters) {
    require_same_grid(c.grid, a_field.grid, "weight_operator_bounds");
    std::vector<double> wb(c.grid.size()), wa(c.grid.size());
    for (std::size_t i = 0; i < wb.size(); ++i) {
        wb[i] = std::abs(c.beta.v[i]);
        wa[i] = std::abs(a_field.v[i]);
    }
    WeightOperatorBounds out;
    out.Lbeta = std::sqrt(pencil_top_eigenvalue(c.grid, wb, tol, max_iters));
    out.La = std::sqrt(pencil_top_eigenvalue(c.grid, wa, tol, max_iters));
    return out;
}

double embedding_constant(const Grid& g, double q, int restarts, std::uint64_t seed) {
    if (!(q >= 2.0)) throw ConfigError("embedding_constant: need q >= 2");
    if (restarts < 1) throw ConfigError("embedding_constant: need restarts >= 1");
    const std::size_t n = g.size();
    const double cell = g.dim == 1 ? g.h : g.h * g.h;
    std::vector<double> ki(n);
    auto ratio = [&](const Field& u) { return lp_norm(u, q) / h1_norm(u); };
    double best = 0.0;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(seed + static_cast<std::uint64_t>(r));
        Field u(g);
        for (auto& v : u.v) v = rng.symmetric();
        double nrm = h1_norm(u);
        if (nrm == 0.0) continue;
        for (auto& v : u.v) v /= nrm;
        double J = ratio(u);
        double step = 0.1;
        for (int it = 0; it < 400 && step > 1e-12; ++it) {
            stencil_apply(g, nullptr, nullptr, u.v, ki);
            double lp = lp_norm(u, q);
            double h1 = h1_norm(u);
            double lp_pow = std::pow(lp, q);
            Field trial(g);
            for (std::size_t i = 0; i < n; ++i) {
                double a = std::abs(u.v[i]);
                double glp = cell * std::pow(a, q - 1.0) * (u.v[i] > 0 ? 1.0 : (u.v[i] < 0 ? -1.0 : 0.0)) / lp_pow;
                double gh1 = cell * (ki[i] + u.v[i]) / (h1 * h1);
                trial.v[i] = u.v[i] + step * (glp - gh1);
            }
            double Jt = ratio(trial);
            if (Jt > J) {
                double tn = h1_norm(trial);
                for (auto& v : trial.v) v /= tn;
                u = std::move(trial);
                J = Jt;
                step *= 1.2;
            } else {
                step *= 0.5;
            }
        }
        best = std::max(best, J);
    }
    return best;
}

double hminus1_norm(const CoefficientSet& c, const Field& w, double cg_tol) {
    require_same_grid(c.grid, w.grid, "hminus1_norm");
    MatVec S = [&](const std::vector<double>& x, std::vector<double>& y) {
        stencil_apply(c.grid, &c.a, c.beta.v.data(), x, y);
    };
    Field y(c.grid);
    CgResult cg = cg_solve(S, w.v, y.v, cg_tol, 500000);
    if (!cg.converged)
        throw NumericalError("hminus1_norm: CG stalled at residual " +
                             format_double(cg.relative_residual));
    return std::sqrt(std::max(0.0, c.eps * l2_inner(y, w)));
}

Rates select_rates(const CoefficientSet& c, double lambda1, double mubar, double theta) {
    if (!(lambda1 > 0.0))
        throw HypothesisError("select_rates: ground-state positivity fails (lambda1 = " +
                              format_double(lambda1) + " <= 0)");
    if (!(c.alpha0 > 0.0))
        throw HypothesisError("select_rates: uniform damping fails (alpha0 = " +
                              format_double(c.alpha0) + " <= 0)");
    if (!(mubar > 0.0)) throw HypothesisError("select_rates: need mubar > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("select_rates: need theta in (0,1)");
    Rates r;
    r.theta = theta;
    double cap = std::min({1.0, c.alpha0 / (2.0 * c.eps), lambda1 / (c.eps + c.alpha1)});
    r.mu = 0.5 * cap;
    r.delta = theta * std::min(lambda1 / c.alpha1, c.alpha0 / (2.0 * c.eps));
    r.nu = std::min(1.0, mubar / 2.0);
    // Re-verify every admissibility inequality exactly as stated.
    if (!(r.mu > 0.0 && 2.0 * r.mu <= cap))
        throw NumericalError("select_rates: mu admissibility failed");
    if (!(r.nu > 0.0 && r.nu <= std::min(1.0, mubar / 2.0)))
        throw NumericalError("select_rates: nu admissibility failed");
    if (!(lambda1 - r.delta * c.alpha1 > 0.0))
        throw NumericalError("select_rates: lambda1 - delta*alpha1 > 0 failed");
    if (!(c.alpha0 - 2.0 * r.delta * c.eps >= 0.0))
        throw NumericalError("select_rates: alpha0 - 2*delta*eps >= 0 failed");
    return r;
}

}  // namespace attractorlab
