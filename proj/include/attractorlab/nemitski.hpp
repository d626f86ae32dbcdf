#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "attractorlab/grid.hpp"
#include "attractorlab/operators.hpp"

namespace attractorlab {

// Nonlinearity f(x, u) with forcing g = f(., 0), plus the growth data
// (Cbar, rhobar, a) of the derivative bound |f_u| <= Cbar (|a| + |u|^rhobar).
// The builtin family is f = g(x) - b(x) u |u|^rhobar with its canonical
// primitive in closed form.
struct NonlinearitySpec {
    enum class Kind { builtin_power, custom };

    Grid grid;
    Kind kind = Kind::builtin_power;
    Field g;
    Field b;
    double rhobar = 0.0;
    Field a;  // growth weight
    double Cbar = 0.0;

    using PointEval = std::function<double(std::size_t node, double u)>;
    PointEval custom_f, custom_dfdu, custom_F;

    double f(std::size_t node, double u) const;
    double dfdu(std::size_t node, double u) const;
    double F(std::size_t node, double u) const;
};

// Builtin family; Cbar < 0 requests the tight default (rhobar+1) * max|b| and
// a defaults to the zero weight.
NonlinearitySpec make_builtin(const Grid& g, Field forcing, Field absorption, double rhobar,
                              Field a_weight = {}, double Cbar = -1.0);

NonlinearitySpec make_custom(const Grid& g, NonlinearitySpec::PointEval f,
                             NonlinearitySpec::PointEval dfdu, NonlinearitySpec::PointEval F,
                             double rhobar, Field a_weight, double Cbar);

struct Evaluated {
    Field f;
    Field F;
    Field dfdu;
};

// Pointwise Nemitski evaluation at every node; NaN from a custom evaluator
// raises a numerical failure naming the node.
Evaluated evaluate(const NonlinearitySpec& spec, const Field& u);

struct AuditReport {
    double max_violation = 0.0;  // <= 0 means the inequality holds everywhere
    std::size_t witness_node = 0;
    double witness_u = 0.0;
    bool pass() const { return max_violation <= 0.0; }
};

// Scans nodes x sampled u-values for violations of the growth bound.
AuditReport growth_audit(const NonlinearitySpec& spec, double u_lo, double u_hi, int samples,
                         std::uint64_t seed);

enum class Criticality { subcritical, critical, supercritical };
Criticality classify_exponent(double rhobar, int N);
std::string to_string(Criticality c);

struct DissipativityCertificate {
    enum class Provenance { closed_form, convexity_lemma, user };
    double mubar = 1.0;
    Field c;
    Provenance provenance = Provenance::closed_form;
    double integral_c = 0.0;
};

// Closed-form certificate for the builtin family (requires b bounded below by
// a positive constant): mubar = 1 and
// c = ((rhobar+1)/(rhobar+2)) |g|^((rhobar+2)/(rhobar+1)) (b/(rhobar+2))^(-1/(rhobar+1)).
DissipativityCertificate dissipativity_constants(const NonlinearitySpec& spec);

// Convexity-route certificate: if F <= D and u -> (gamma D - F)^nu is convex,
// then mubar = 1/nu and c = max(1, gamma^nu (gamma-1)^(1-nu) / nu) D. The
// convexity is certified numerically on the supplied u samples.
DissipativityCertificate dissipativity_from_convexity(const Field& D, double gamma_c,
                                                      double nu_c,
                                                      const NonlinearitySpec& spec,
                                                      const std::vector<double>& u_samples);

// Checks f u - mubar F <= c and F <= c over nodes x u-grid.
AuditReport dissipativity_audit(const NonlinearitySpec& spec,
                                const DissipativityCertificate& cert, double u_lo, double u_hi,
                                int samples);

struct SuiteEntry {
    std::string name;
    double slack = 0.0;      // RHS - LHS; >= 0 means the inequality holds
    bool determinate = true;
};

struct EstimateSuiteReport {
    std::vector<SuiteEntry> entries;
    double min_determinate_slack = 0.0;
    double critical_ratio = 0.0;  // LHS / structural factor for the dual-norm bound
};

// Evaluates every Nemitski-operator inequality with discrete norms: five
// pointwise bounds (slack = min over nodes), five integral bounds, and the
// critical dual-norm estimate reported as a ratio (its embedding constant is
// not certified). a1/a2 optionally split the growth weight; default a1 = a,
// a2 = 0. r_exponent is the integrability exponent used for |a1|.
EstimateSuiteReport estimate_suite(const NonlinearitySpec& spec, const CoefficientSet& coeffs,
                                   const Field& u, const Field& h, double r_exponent,
                                   const Field* a1 = nullptr, const Field* a2 = nullptr);

// Directional derivative probe of the integrated primitive:
// [int F(u + tau h) - int F(u)] / (tau <f(u), h>), which tends to 1 as tau -> 0.
double frechet_ratio(const NonlinearitySpec& spec, const Field& u, const Field& h, double tau);

}  // namespace attractorlab
