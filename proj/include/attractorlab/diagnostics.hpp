#pragma once

#include <vector>

#include "attractorlab/nemitski.hpp"
#include "attractorlab/operators.hpp"
#include "attractorlab/semiflow.hpp"

namespace attractorlab {

// Spatial weight pair (gamma, gamma_bar) with gamma = gamma_bar^2 at every
// node and analytic gradients at interfaces (zero for the trivial weight).
struct WeightSet {
    enum class Kind { ones, cutoff };

    Grid grid;
    Kind kind = Kind::ones;
    double k = 0.0;
    Field gamma;
    Field gamma_bar;
    StaggeredField grad_gamma;
    StaggeredField grad_gamma_bar;

    static WeightSet ones(const Grid& g);
    static WeightSet cutoff_at(const Grid& g, double k);
};

struct LyapunovValues {
    double V = 0.0;
    double Vstar = 0.0;
    double eta = 0.0;  // V - Vstar
    double w = 0.0;
    double s = 0.0;          // exact discrete decomposition defect
    double s_formula = 0.0;  // continuum expression, corrected second term
};

// All monitored functionals at one state. The s value is defined by the exact
// discrete difference int gamma (A grad u, grad u) - int (A grad(gb u), grad(gb u)),
// which makes the weighted-energy decomposition identity hold to rounding.
LyapunovValues lyapunov_values(const CoefficientSet& c, const NonlinearitySpec* spec,
                               const StateZ& z, const WeightSet& weights, double delta,
                               double mu);

// The decay functional of the linear group (no spatial weight).
double w_functional(const CoefficientSet& c, const StateZ& z, double mu);

struct IdentityReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
    double scale = 0.0;
};

// Centered-difference defect of the weighted energy identity
// (V o z)' + 2 delta (V o z) = RHS along a uniformly recorded trajectory.
IdentityReport energy_identity_check(const Trajectory& traj, const CoefficientSet& c,
                                     const NonlinearitySpec* spec, const WeightSet& weights,
                                     double delta);

// Same for (V* o z)'(t) = int gamma f(x, z1) z2.
IdentityReport vstar_derivative_check(const Trajectory& traj, const NonlinearitySpec* spec,
                                      const WeightSet& weights);

// Defect of the integrated energy equation for F = V - V* with trivial weight,
// time integrals by the trapezoid rule over records.
IdentityReport ball_energy_check(const Trajectory& traj, const CoefficientSet& c,
                                 const NonlinearitySpec* spec, double delta);

// Discretization tolerance calibrated from the measured identity defect:
// ten times the weighted-energy-identity residual plus a scale floor.
double discrete_tolerance(const Trajectory& traj, const CoefficientSet& c,
                          const NonlinearitySpec* spec, const WeightSet& weights, double delta);

struct EtaReport {
    std::vector<double> slacks;
    double min_slack = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Slack of the differential inequality eta' + 2 delta nu eta <= RHS at
// interior records; passes when min slack >= -tol_discrete.
EtaReport eta_inequality_check(const Trajectory& traj, const CoefficientSet& c,
                               const NonlinearitySpec* spec, const WeightSet& weights,
                               const Rates& rates, const DissipativityCertificate& cert,
                               double tol_discrete);

struct TailReport {
    enum class Mode { constants, trajectory };
    double k = 0.0;
    double xi_k = 0.0;
    double zeta_k = 0.0;
    double c_k = 0.0;
    double Mbar = 0.0;
    double Mprime = 0.0;
    double cprime = 0.0;
    double cbar = 0.0;
    Mode mode = Mode::trajectory;
};

// Assembles the tail-bound constants for exterior radius k and energy radius
// R. Constants mode builds Mbar from the a-priori formula (embedding estimate
// included); trajectory mode sets Mbar = |eta(0)| with the matching weight.
TailReport tail_constants(const CoefficientSet& c, const NonlinearitySpec* spec,
                          const ConstantsBundle& bundle, const DissipativityCertificate& cert,
                          double R, double k, TailReport::Mode mode,
                          const StateZ* z0 = nullptr);

// Exterior energy int theta_k ((eps/2) v^2 + (A grad u, grad u) + (beta - delta alpha) u^2).
double tail_energy(const CoefficientSet& c, const StateZ& z, double k, double delta);
// Same integrand with the trivial weight.
double total_energy(const CoefficientSet& c, const StateZ& z, double delta);

struct TailBoundReport {
    struct PerK {
        double k = 0.0;
        double max_excess = 0.0;
        double witness_t = 0.0;
        TailReport constants;
    };
    std::vector<PerK> per_k;
    double total_max_excess = 0.0;
    double total_witness_t = 0.0;
    TailReport total_constants;
    double R_used = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Verifies tail_energy(t) <= c_k + M' e^{-2 delta nu t} for each k and the
// total-energy analogue with c'. Requires R to dominate |z(t)|_Z along the
// trajectory; fails with a witness time otherwise.
TailBoundReport tail_bound_check(const Trajectory& traj, const CoefficientSet& c,
                                 const NonlinearitySpec* spec, const ConstantsBundle& bundle,
                                 const DissipativityCertificate& cert, double R,
                                 const std::vector<double>& ks, double tol_discrete,
                                 TailReport::Mode mode = TailReport::Mode::trajectory);

// Asymptotic radius implied by the total bound once the exponential term has
// died out: sqrt((c' + margin) / min(eps/2, c_low)) with margin = c'/100.
double ultimate_bound(const CoefficientSet& c, double cprime, double c_low);

struct YGrowthReport {
    double C1 = 0.0;
    double C2 = 0.0;
};

// Empirical growth envelope |T(t) z|_Y <= C1 e^{C2 t} |z|_Y over an ensemble
// of linear trajectories, |z|_Y^2 = |z1|_L2^2 + |z2|_{-1}^2. Reported, never
// certified.
YGrowthReport y_growth_probe(const CoefficientSet& c, const std::vector<StateZ>& ensemble,
                             double T, double dt, double cg_tol = 1e-10);

}  // namespace attractorlab
