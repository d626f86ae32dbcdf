#include "attractorlab/nemitski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attractorlab/numfmt.hpp"
#include "attractorlab/parallel.hpp"
#include "attractorlab/rng.hpp"

namespace attractorlab {

double NonlinearitySpec::f(std::size_t node, double u) const {
    if (kind == Kind::builtin_power) return g.v[node] - b.v[node] * u * std::pow(std::abs(u), rhobar);
    return custom_f(node, u);
}

double NonlinearitySpec::dfdu(std::size_t node, double u) const {
    if (kind == Kind::builtin_power)
        return -b.v[node] * (rhobar + 1.0) * std::pow(std::abs(u), rhobar);
    return custom_dfdu(node, u);
}

double NonlinearitySpec::F(std::size_t node, double u) const {
    if (kind == Kind::builtin_power)
        return g.v[node] * u - b.v[node] * std::pow(std::abs(u), rhobar + 2.0) / (rhobar + 2.0);
    return custom_F(node, u);
}

NonlinearitySpec make_builtin(const Grid& g, Field forcing, Field absorption, double rhobar,
                              Field a_weight, double Cbar) {
    require_same_grid(g, forcing.grid, "make_builtin");
    require_same_grid(g, absorption.grid, "make_builtin");
    if (!(rhobar >= 0.0)) throw ConfigError("make_builtin: need rhobar >= 0");
    NonlinearitySpec s;
    s.grid = g;
    s.kind = NonlinearitySpec::Kind::builtin_power;
    s.g = std::move(forcing);
    s.b = std::move(absorption);
    s.rhobar = rhobar;
    s.a = a_weight.v.empty() ? Field(g, 0.0) : std::move(a_weight);
    require_same_grid(g, s.a.grid, "make_builtin");
    if (Cbar < 0.0) {
        double bmax = 0.0;
        for (double v : s.b.v) bmax = std::max(bmax, std::abs(v));
        s.Cbar = (rhobar + 1.0) * bmax;
    } else {
        s.Cbar = Cbar;
    }
    return s;
}

NonlinearitySpec make_custom(const Grid& g, NonlinearitySpec::PointEval f,
                             NonlinearitySpec::PointEval dfdu, NonlinearitySpec::PointEval F,
                             double rhobar, Field a_weight, double Cbar) {
    if (!f || !dfdu || !F) throw ConfigError("make_custom: all three evaluators required");
    NonlinearitySpec s;
    s.grid = g;
    s.kind = NonlinearitySpec::Kind::custom;
    s.custom_f = std::move(f);
    s.custom_dfdu = std::move(dfdu);
    s.custom_F = std::move(F);
    s.rhobar = rhobar;
    s.Cbar = Cbar;
    s.a = a_weight.v.empty() ? Field(g, 0.0) : std::move(a_weight);
    require_same_grid(g, s.a.grid, "make_custom");
    Field zero(g, 0.0);
    s.g = Field(g);
    for (std::size_t i = 0; i < g.size(); ++i) s.g.v[i] = s.custom_f(i, 0.0);
    s.b = Field(g, 0.0);
    return s;
}

Evaluated evaluate(const NonlinearitySpec& spec, const Field& u) {
    require_same_grid(spec.grid, u.grid, "evaluate");
    Evaluated out{Field(spec.grid), Field(spec.grid), Field(spec.grid)};
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.f.v[i] = spec.f(i, u.v[i]);
        out.F.v[i] = spec.F(i, u.v[i]);
        out.dfdu.v[i] = spec.dfdu(i, u.v[i]);
        if (!std::isfinite(out.f.v[i]) || !std::isfinite(out.F.v[i]) ||
            !std::isfinite(out.dfdu.v[i]))
            throw NumericalError("evaluate: non-finite value at node " + std::to_string(i) +
                                 " (u = " + format_double(u.v[i]) + ")");
    }
    return out;
}

namespace {

// Shared scan machinery for the audits: max violation over nodes x u-values
// with a deterministic chunked reduction.
template <class Violation>
AuditReport scan_audit(std::size_t nodes, const std::vector<double>& us, Violation&& viol) {
    const std::size_t chunks = 64;
    struct Partial {
        double max_v = -std::numeric_limits<double>::infinity();
        std::size_t node = 0;
        double u = 0.0;
    };
    std::vector<Partial> parts(chunks);
    run_chunked(nodes, chunks, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        Partial p;
        for (std::size_t i = lo; i < hi; ++i)
            for (double u : us) {
                double v = viol(i, u);
                if (v > p.max_v) {
                    p.max_v = v;
                    p.node = i;
                    p.u = u;
                }
            }
        parts[c] = p;
    });
    AuditReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts)
        if (p.max_v > rep.max_violation) {
            rep.max_violation = p.max_v;
            rep.witness_node = p.node;
            rep.witness_u = p.u;
        }
    return rep;
}

std::vector<double> audit_points(double lo, double hi, int samples, std::uint64_t seed,
                                 bool randomized) {
    if (!(hi >= lo)) throw ConfigError("audit: empty u-range");
    if (samples < 2) throw ConfigError("audit: need at least 2 samples");
    std::vector<double> us;
    us.reserve(static_cast<std::size_t>(samples) + 3);
    us.push_back(lo);
    us.push_back(hi);
    if (lo < 0.0 && hi > 0.0) us.push_back(0.0);
    if (randomized) {
        Rng rng(seed);
        for (int i = 0; i < samples; ++i) us.push_back(rng.uniform(lo, hi));
    } else {
        for (int i = 1; i + 1 < samples; ++i)
            us.push_back(lo + (hi - lo) * static_cast<double>(i) / (samples - 1));
    }
    return us;
}

}  // namespace

AuditReport growth_audit(const NonlinearitySpec& spec, double u_lo, double u_hi, int samples,
                         std::uint64_t seed) {
    auto us = audit_points(u_lo, u_hi, samples, seed, true);
    return scan_audit(spec.grid.size(), us, [&](std::size_t i, double u) {
        return std::abs(spec.dfdu(i, u)) -
               spec.Cbar * (std::abs(spec.a.v[i]) + std::pow(std::abs(u), spec.rhobar));
    });
}

Criticality classify_exponent(double rhobar, int N) {
    if (N < 1 || N > 3) throw ConfigError("classify_exponent: N must be in {1,2,3}");
    if (!(rhobar >= 0.0)) throw ConfigError("classify_exponent: need rhobar >= 0");
    if (N <= 2) return Criticality::subcritical;
    double two_star = 2.0 * N / (N - 2.0);
    double val = 2.0 * (rhobar + 1.0);
    if (val < two_star) return Criticality::subcritical;
    if (val == two_star) return Criticality::critical;
    return Criticality::supercritical;
}

std::string to_string(Criticality c) {
    switch (c) {
        case Criticality::subcritical: return "subcritical";
        case Criticality::critical: return "critical";
        default: return "supercritical";
    }
}

DissipativityCertificate dissipativity_constants(const NonlinearitySpec& spec) {
    if (spec.kind != NonlinearitySpec::Kind::builtin_power)
        throw ConfigError("dissipativity_constants: closed form exists for the builtin family only");
    double b0 = std::numeric_limits<double>::infinity();
    for (double v : spec.b.v) b0 = std::min(b0, v);
    if (!(b0 > 0.0))
        throw HypothesisError("dissipativity_constants: absorption not bounded below (min b = " +
                              format_double(b0) + ")");
    const double rb = spec.rhobar;
    DissipativityCertificate cert;
    cert.mubar = 1.0;
    cert.provenance = DissipativityCertificate::Provenance::closed_form;
    cert.c = Field(spec.grid);
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        double gi = std::abs(spec.g.v[i]);
        double ci = gi == 0.0
                        ? 0.0
                        : ((rb + 1.0) / (rb + 2.0)) * std::pow(gi, (rb + 2.0) / (rb + 1.0)) *
                              std::pow(spec.b.v[i] / (rb + 2.0), -1.0 / (rb + 1.0));
        cert.c.v[i] = std::max(0.0, ci);
    }
    double cell = spec.grid.dim == 1 ? spec.grid.h : spec.grid.h * spec.grid.h;
    double sum = 0.0;
    for (double v : cert.c.v) sum += v;
    cert.integral_c = cell * sum;
    return cert;
}

DissipativityCertificate dissipativity_from_convexity(const Field& D, double gamma_c,
                                                      double nu_c,
                                                      const NonlinearitySpec& spec,
                                                      const std::vector<double>& u_samples) {
    require_same_grid(D.grid, spec.grid, "dissipativity_from_convexity");
    if (!(gamma_c > 1.0) || !(nu_c > 1.0))
        throw ConfigError("dissipativity_from_convexity: need gamma > 1 and nu > 1");
    if (u_samples.size() < 3)
        throw ConfigError("dissipativity_from_convexity: need at least 3 u samples");
    for (std::size_t j = 1; j < u_samples.size(); ++j)
        if (!(u_samples[j] > u_samples[j - 1]))
            throw ConfigError("dissipativity_from_convexity: u samples must increase");
    const std::size_t n = spec.grid.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!(D.v[i] > 0.0))
            throw CheckError("dissipativity_from_convexity: D <= 0 at node " + std::to_string(i));
    // F <= D and convexity of (gamma D - F)^nu, certified sample-wise.
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> G(u_samples.size());
        for (std::size_t j = 0; j < u_samples.size(); ++j) {
            double Fj = spec.F(i, u_samples[j]);
            if (!(Fj <= D.v[i]))
                throw CheckError("dissipativity_from_convexity: F > D at node " +
                                 std::to_string(i) + ", u = " + format_double(u_samples[j]));
            G[j] = std::pow(gamma_c * D.v[i] - Fj, nu_c);
        }
        for (std::size_t j = 1; j + 1 < u_samples.size(); ++j) {
            double dl = (G[j] - G[j - 1]) / (u_samples[j] - u_samples[j - 1]);
            double dr = (G[j + 1] - G[j]) / (u_samples[j + 1] - u_samples[j]);
            double scale = std::max({1.0, std::abs(G[j - 1]), std::abs(G[j]), std::abs(G[j + 1])});
            if (dr - dl < -1e-10 * scale)
                throw CheckError("dissipativity_from_convexity: convexity violated at node " +
                                 std::to_string(i) + ", u = " + format_double(u_samples[j]));
        }
    }
    DissipativityCertificate cert;
    cert.mubar = 1.0 / nu_c;
    cert.provenance = DissipativityCertificate::Provenance::convexity_lemma;
    double factor = std::max(1.0, std::pow(gamma_c, nu_c) * std::pow(gamma_c - 1.0, 1.0 - nu_c) /
                                      nu_c);
    cert.c = Field(spec.grid);
    for (std::size_t i = 0; i < n; ++i) cert.c.v[i] = factor * D.v[i];
    double cell = spec.grid.dim == 1 ? spec.grid.h : spec.grid.h * spec.grid.h;
    double sum = 0.0;
    for (double v : cert.c.v) sum += v;
    cert.integral_c = cell * sum;
    return cert;
}

AuditReport dissipativity_audit(const NonlinearitySpec& spec,
                                const DissipativityCertificate& cert, double u_lo, double u_hi,
                                int samples) {
    require_same_grid(spec.grid, cert.c.grid, "dissipativity_audit");
    for (double v : cert.c.v)
        if (!std::isfinite(v))
            throw ConfigError("dissipativity_audit: certificate carries non-finite c");
    auto us = audit_points(u_lo, u_hi, samples, 0, false);
    return scan_audit(spec.grid.size(), us, [&](std::size_t i, double u) {
        double Fi = spec.F(i, u);
        double lhs1 = spec.f(i, u) * u - cert.mubar * Fi;
        return std::max(lhs1, Fi) - cert.c.v[i];
    });
}

EstimateSuiteReport estimate_suite(const NonlinearitySpec& spec, const CoefficientSet& coeffs,
                                   const Field& u, const Field& h, double r_exponent,
                                   const Field* a1, const Field* a2) {
    require_same_grid(spec.grid, u.grid, "estimate_suite");
    require_same_grid(u.grid, h.grid, "estimate_suite");
    const std::size_t n = spec.grid.size();
    const double rb = spec.rhobar;
    const double C = spec.Cbar;
    const double m1 = std::max(1.0, std::pow(2.0, rb - 1.0));
    const double m2 = std::max(1.0, std::pow(2.0, rb));

    Field zero(spec.grid, 0.0);
    Evaluated at0 = evaluate(spec, zero);
    Evaluated atu = evaluate(spec, u);
    Field uph(spec.grid);
    for (std::size_t i = 0; i < n; ++i) uph.v[i] = u.v[i] + h.v[i];
    Evaluated atuh = evaluate(spec, uph);

    EstimateSuiteReport rep;
    auto push = [&](std::string name, double slack, bool det = true) {
        rep.entries.push_back({std::move(name), slack, det});
    };
    auto min_over_nodes = [&](auto&& fn) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) worst = std::min(worst, fn(i));
        return worst;
    };

    // Pointwise bounds: slack = min over nodes of RHS - LHS.
    push("pw_increment_from_zero", min_over_nodes([&](std::size_t i) {
             double au = std::abs(u.v[i]);
             double rhs = C * std::abs(spec.a.v[i]) * au + C * std::pow(au, rb + 1.0);
             return rhs - std::abs(atu.f.v[i] - at0.f.v[i]);
         }));
    push("pw_lipschitz", min_over_nodes([&](std::size_t i) {
             double au = std::abs(u.v[i]), ah = std::abs(h.v[i]);
             double rhs = C * std::abs(spec.a.v[i]) * ah +
                          C * m1 * (std::pow(au, rb) + std::pow(ah, rb)) * ah;
             return rhs - std::abs(atuh.f.v[i] - atu.f.v[i]);
         }));
    push("pw_primitive_bound", min_over_nodes([&](std::size_t i) {
             double au = std::abs(u.v[i]);
             double rhs = C * (std::abs(spec.a.v[i]) * au * au / 2.0 +
                               std::pow(au, rb + 2.0) / (rb + 2.0)) +
                          au * std::abs(at0.f.v[i]);
             return rhs - std::abs(atu.F.v[i]);
         }));
    push("pw_primitive_lipschitz", min_over_nodes([&](std::size_t i) {
             double au = std::abs(u.v[i]), ah = std::abs(h.v[i]);
             double rhs = (std::abs(at0.f.v[i]) + C * std::abs(spec.a.v[i]) * (au + ah) +
                           C * m2 * (std::pow(au, rb + 1.0) + std::pow(ah, rb + 1.0))) *
                          ah;
             return rhs - std::abs(atuh.F.v[i] - atu.F.v[i]);
         }));
    push("pw_remainder", min_over_nodes([&](std::size_t i) {
             double au = std::abs(u.v[i]), ah = std::abs(h.v[i]);
             double rhs = (C * std::abs(spec.a.v[i]) +
                           C * m1 * (std::pow(au, rb) + std::pow(ah, rb))) *
                          ah * ah;
             return rhs - std::abs(atuh.F.v[i] - atu.F.v[i] - atu.f.v[i] * h.v[i]);
         }));

    // Integral bounds with the discrete norms.
    const double q = 2.0 * (rb + 1.0);
    auto prod = [&](const Field& x, const Field& y) {
        Field p(spec.grid);
        for (std::size_t i = 0; i < n; ++i) p.v[i] = x.v[i] * y.v[i];
        return p;
    };
    auto pow_norm = [&](const Field& x, double e, double p) {
        return std::pow(lp_norm(x, p), e);
    };
    Field au_f = prod(spec.a, u), ah_f = prod(spec.a, h);
    Field fuh_minus_fu(spec.grid), Fu_diff(spec.grid), rem(spec.grid);
    for (std::size_t i = 0; i < n; ++i) {
        fuh_minus_fu.v[i] = atuh.f.v[i] - atu.f.v[i];
        Fu_diff.v[i] = atuh.F.v[i] - atu.F.v[i];
        rem.v[i] = atuh.F.v[i] - atu.F.v[i] - atu.f.v[i] * h.v[i];
    }
    double f0_l2 = lp_norm(at0.f, 2.0);
    push("int_f_l2", f0_l2 + C * (lp_norm(au_f, 2.0) + pow_norm(u, rb + 1.0, q)) -
                         lp_norm(atu.f, 2.0));
    push("int_f_lipschitz_l2",
         C * lp_norm(ah_f, 2.0) +
             C * m1 * (pow_norm(u, rb, q) + pow_norm(h, rb, q)) * lp_norm(h, q) -
             lp_norm(fuh_minus_fu, 2.0));
    {
        Field au2(spec.grid);
        for (std::size_t i = 0; i < n; ++i) au2.v[i] = spec.a.v[i] * u.v[i] * u.v[i];
        push("int_F_l1", C * (lp_norm(au2, 1.0) / 2.0 +
                              pow_norm(u, rb + 2.0, rb + 2.0) / (rb + 2.0)) +
                             lp_norm(u, 2.0) * f0_l2 - lp_norm(atu.F, 1.0));
    }
    push("int_F_lipschitz_l1",
         (f0_l2 + C * (lp_norm(au_f, 2.0) + lp_norm(ah_f, 2.0)) +
          C * m2 * (pow_norm(u, rb + 1.0, q) + pow_norm(h, rb + 1.0, q))) *
                 lp_norm(h, 2.0) -
             lp_norm(Fu_diff, 1.0));
    push("int_remainder_l1",
         (C * lp_norm(ah_f, 2.0) +
          C * m1 * (pow_norm(u, rb, q) + pow_norm(h, rb, q)) * lp_norm(h, q)) *
                 lp_norm(h, 2.0) -
             lp_norm(rem, 1.0));

    rep.min_determinate_slack = std::numeric_limits<double>::infinity();
    for (const auto& e : rep.entries)
        rep.min_determinate_slack = std::min(rep.min_determinate_slack, e.slack);

    // Critical dual-norm estimate: its constant routes through embedding
    // constants the construction never evaluates, so only the ratio of the
    // left side to the structural factor is reported. The Lq exponent
    // 2(rhobar+1) coincides with the critical Sobolev exponent when rhobar is
    // critical.
    {
        const Field& split1 = a1 ? *a1 : spec.a;
        double a1_norm = lp_norm(split1, r_exponent);
        double a2_norm = 0.0;
        if (a2)
            for (double v : a2->v) a2_norm = std::max(a2_norm, std::abs(v));
        double h_l2 = lp_norm(h, 2.0);
        double factor = (a1_norm + a2_norm) * h_l2 +
                        (pow_norm(u, rb, q) + pow_norm(h, rb, q)) * h_l2;
        double lhs = hminus1_norm(coeffs, fuh_minus_fu);
        rep.critical_ratio = factor > 0.0 ? lhs / factor : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        rep.entries.push_back({"critical_hminus1_ratio", rep.critical_ratio, false});
    }
    return rep;
}

double frechet_ratio(const NonlinearitySpec& spec, const Field& u, const Field& h, double tau) {
    require_same_grid(spec.grid, u.grid, "frechet_ratio");
    require_same_grid(u.grid, h.grid, "frechet_ratio");
    if (!(tau > 0.0)) throw ConfigError("frechet_ratio: need tau > 0");
    Field upt(spec.grid);
    for (std::size_t i = 0; i < u.size(); ++i) upt.v[i] = u.v[i] + tau * h.v[i];
    Evaluated at_u = evaluate(spec, u);
    Evaluated at_t = evaluate(spec, upt);
    double cell = spec.grid.dim == 1 ? spec.grid.h : spec.grid.h * spec.grid.h;
    double dF = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dF += at_t.F.v[i] - at_u.F.v[i];
    dF *= cell;
    double pairing = l2_inner(at_u.f, h);
    if (pairing == 0.0) throw NumericalError("frechet_ratio: degenerate direction, <f(u), h> = 0");
    return dF / (tau * pairing);
}

}  // namespace attractorlab
