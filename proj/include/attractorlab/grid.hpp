#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <tuple>
#include <vector>

#include "attractorlab/errors.hpp"

namespace attractorlab {

// Uniform tensor grid on the open box (-X, X)^dim with homogeneous Dirichlet
// data. Only interior nodes are stored; boundary values are identically zero
// and implicit in every operator.
struct Grid {
    int dim = 1;              // 1 or 2
    double half_width = 1.0;  // X
    int n = 3;                // interior nodes per axis
    double h = 0.5;           // 2X/(n+1)

    std::size_t size() const {
        return dim == 1 ? static_cast<std::size_t>(n)
                        : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    // Interior node m (0-based) along an axis sits at -X + (m+1)h.
    double node_coord(int m) const { return -half_width + (m + 1) * h; }
    // Interface i (0..n) along an axis sits at -X + (i+1/2)h, between node i-1
    // and node i (indices -1 and n denote the boundary).
    double iface_coord(int i) const { return -half_width + (i + 0.5) * h; }
    // Interfaces per axis line.
    int ifaces() const { return n + 1; }

    bool operator==(const Grid&) const = default;
};

Grid build_grid(int dim, double half_width, int n);

// Node-centered scalar samples, row-major over axes (axis 0 slowest).
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Samples a function of the node coordinates; fn receives (x) or (x, y).
Field make_field(const Grid& g, const std::function<double(double, double)>& fn);

// Interface-centered per-axis values: axis d holds (n+1)*n^(dim-1) reals.
// Axis 0 layout: index ix*rows + j where ix in [0,n] is the interface along
// axis 0 and j indexes the transverse node line. Axis 1 (dim 2 only): index
// mx*(n+1) + iy.
struct StaggeredField {
    Grid grid;
    std::array<std::vector<double>, 2> axis;

    StaggeredField() = default;
    explicit StaggeredField(const Grid& g, double fill = 0.0) : grid(g) {
        std::size_t per_axis = static_cast<std::size_t>(g.n + 1) *
                               (g.dim == 2 ? static_cast<std::size_t>(g.n) : 1u);
        axis[0].assign(per_axis, fill);
        if (g.dim == 2) axis[1].assign(per_axis, fill);
    }
};

// Samples a function of the interface coordinates on every axis.
StaggeredField make_staggered(const Grid& g,
                              const std::function<double(int axis, double x, double y)>& fn);

// State z = (u, v) of the first-order system; u carries the displacement,
// v its time derivative.
struct StateZ {
    Field u;
    Field v;

    StateZ() = default;
    StateZ(Field u_, Field v_);
    explicit StateZ(const Grid& g) : u(g), v(g) {}
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// Discrete L2 pairing h^dim * sum(u*w).
double l2_inner(const Field& u, const Field& w);
// (h^dim * sum |u|^p)^(1/p); p must be finite and >= 1.
double lp_norm(const Field& u, double p);
// Forward differences at interfaces with zero Dirichlet extension; the exact
// negative adjoint of the flux divergence used by apply_elliptic.
StaggeredField gradient(const Field& u);
// h^dim-weighted product over all interfaces of both axes.
double staggered_inner(const StaggeredField& a, const StaggeredField& b);
// Same, with a per-interface weight (e.g. diffusion coefficients).
double staggered_inner_weighted(const StaggeredField& w, const StaggeredField& a,
                                const StaggeredField& b);
// sqrt(|grad u|_L2^2 + |u|_L2^2), boundary interfaces included.
double h1_norm(const Field& u);

// Spec-shaped combined call: (l2_inner(u,w), lp_norm(u,p), h1_norm(u)).
std::tuple<double, double, double> inner_and_norms(const Field& u, const Field& w, double p);

// Uniformly-local Lp norm: max over unit-side windows centered at nodes of the
// windowed Lp integral, function extended by zero outside the box. Windows are
// node-centered only, which under-approximates the continuum sup by at most
// one spacing h. Requires h <= 1.
double lpu_norm(const Field& u, double p);

// Quintic C^2 ramp profile: 0 for s <= 1, 1 for s >= 2, 6t^5-15t^4+10t^3 on
// the transition with t = s-1.
double thetabar_profile(double s);
double thetabar_profile_deriv(double s);
double theta_profile(double s);        // thetabar^2
double theta_profile_deriv(double s);  // 2*thetabar*thetabar'

// Exterior cutoff pair at radius k: theta_bar_k(x) = thetabar(|x|^2/k^2),
// theta_k = theta_bar_k^2, with exact analytic gradients at interfaces and the
// gradient-bound constants 2*sqrt(2)*sup|profile'|.
struct Cutoffs {
    Field theta_bar;
    Field theta;
    StaggeredField grad_theta_bar;
    StaggeredField grad_theta;
    double C_theta = 0.0;
    double C_thetabar = 0.0;
};

Cutoffs cutoffs(const Grid& g, double k);

// sup over the profile argument of |d(theta)/ds|, by dense sampling.
double theta_profile_deriv_sup();
// sup |d(thetabar)/ds| = 15/8, the closed-form maximum of the quintic ramp.
double thetabar_profile_deriv_sup();

}  // namespace attractorlab
