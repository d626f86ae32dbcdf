#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "attractorlab/grid.hpp"

namespace attractorlab {

// Problem coefficients: eps*u_tt + alpha*u_t + beta*u - div(A grad u) = f.
// A is diagonal and sampled at interfaces; the certified bounds are taken over
// the stored samples.
struct CoefficientSet {
    Grid grid;
    double eps = 1.0;
    Field alpha;
    Field beta;
    StaggeredField a;  // per-axis interface samples of the diagonal of A
    double a0 = 0.0, a1 = 0.0;          // bounds on the interface samples
    double alpha0 = 0.0, alpha1 = 0.0;  // bounds on alpha
    double beta_abs_max = 0.0;

    bool damped() const { return alpha0 > 0.0; }
    // Crude operator-norm bound for S = -div(A grad .) + beta.
    double stationary_norm_bound() const {
        return 4.0 * a1 * grid.dim / (grid.h * grid.h) + beta_abs_max;
    }
};

// Builds a CoefficientSet from analytic expressions; a_fn is sampled directly
// at interface coordinates, alpha/beta at nodes. Bounds are certified from the
// samples.
CoefficientSet make_coefficients(const Grid& g, double eps,
                                 const std::function<double(double, double)>& alpha_fn,
                                 const std::function<double(double, double)>& beta_fn,
                                 const std::function<double(int, double, double)>& a_fn);

// Variant taking node fields; interface coefficients are arithmetic averages
// of the adjacent node values (boundary interfaces copy the interior node).
CoefficientSet make_coefficients(const Grid& g, double eps, Field alpha, Field beta,
                                 const Field& a_nodes);

// Variant taking interface samples directly.
CoefficientSet make_coefficients(const Grid& g, double eps, Field alpha, Field beta,
                                 StaggeredField a);

// Flux-form divergence: (div A grad u) with zero Dirichlet extension. Exact
// summation-by-parts adjoint of `gradient`.
Field apply_elliptic(const CoefficientSet& c, const Field& u);

// Raw matvec of S = -div(A grad .) + beta on coefficient vectors; shared by
// the eigensolvers, the dual norm, and the implicit time stepper.
void apply_S(const CoefficientSet& c, const std::vector<double>& x, std::vector<double>& y);

// <A grad u, grad w> + <beta u, w>.
double energy_form(const CoefficientSet& c, const Field& u, const Field& w);
// The H1_0 scalar product of the damped system: energy_form / eps.
double h1_inner(const CoefficientSet& c, const Field& u, const Field& w);

struct EigenResult {
    double value = 0.0;
    Field field;
    int iterations = 0;
};

// Smallest eigenvalue of S = -div(A grad .) + beta w.r.t. the L2 pairing, by
// shifted inverse power iteration with CG inner solves. Returns the eigenpair;
// the value may be <= 0 (hypothesis checks happen downstream).
EigenResult principal_eigenvalue(const CoefficientSet& c, double tol = 1e-8,
                                 int max_outer = 500);

// Smallest constant C with <|beta| u, u> <= eps_bar |u|_H1^2 + C |u|_L2^2 over
// the grid space, clamped at zero. Power iteration on the shifted form; if the
// top of the spectrum is too clustered to resolve, a certified Weyl upper
// bound is returned instead, which keeps the inequality valid.
double form_bound_constant(const CoefficientSet& c, double eps_bar, double tol = 1e-12,
                           int max_iters = 10000);

struct CoerciveConstants {
    double c_low = 0.0;
    double C_up = 0.0;
    double eps_bar = 0.0;
    double rho = 0.0;
    double kappa = 0.0;
    std::map<double, double> c_eps_bar;  // evaluated form-bound constants
};

// Maximizes c = min(rho (a0 - eb), (1-rho)(lambda1-kappa) - rho (eb + C_eb + kappa))
// over a logarithmic eps_bar set and rho in {0.05..0.95}; fails if no positive c.
CoerciveConstants coercive_constants(const CoefficientSet& c, double kappa, double lambda1);

// The eps_bar search set used by coercive_constants, scaled by a0.
std::vector<double> eps_bar_search_set(double a0);

struct WeightOperatorBounds {
    double Lbeta = 0.0;
    double La = 0.0;
};

// Norms of u -> |beta|^(1/2) u and u -> |w|^(1/2) u from H1_0 to L2:
// square roots of the top eigenvalue of the weight-vs-(stiffness+mass) pencil.
WeightOperatorBounds weight_operator_bounds(const CoefficientSet& c, const Field& a_field,
                                            double tol = 1e-10, int max_iters = 20000);

// Best found value of |u|_Lq / |u|_H1 by projected gradient ascent with random
// restarts. A lower-bound estimate of the embedding constant, never exact.
double embedding_constant(const Grid& g, double q, int restarts, std::uint64_t seed);

// Norm dual to the H1_0 scalar product: solve S y = w, return sqrt(eps <y, w>).
double hminus1_norm(const CoefficientSet& c, const Field& w, double cg_tol = 1e-10);

struct Rates {
    double mu = 0.0;
    double delta = 0.0;
    double nu = 0.0;
    double theta = 0.5;
};

// Decay/weight rates: mu = (1/2) min(1, alpha0/(2 eps), lambda1/(eps+alpha1));
// delta = theta * min(lambda1/alpha1, alpha0/(2 eps)); nu = min(1, mubar/2).
// All admissibility inequalities are re-verified before returning.
Rates select_rates(const CoefficientSet& c, double lambda1, double mubar, double theta = 0.5);

// Every scalar constant of the estimates, as assembled by the pipeline.
struct ConstantsBundle {
    double lambda1 = 0.0;
    double mu = 0.0, delta = 0.0, nu = 0.0;
    double mubar = 0.0;
    double Cbar = 0.0, rhobar = 0.0, taubar = 0.0;
    double Lbeta = 0.0, La = 0.0;
    double C2 = 0.0;  // embedding estimate (lower bound)
    double C_theta = 0.0, C_thetabar = 0.0;
    std::map<double, double> c_eps_bar;
    std::map<double, CoerciveConstants> coercive;  // keyed by kappa
};

}  // namespace attractorlab
