#include "attractorlab/grid.hpp"

#include <cmath>
#include <string>

namespace attractorlab {

Grid build_grid(int dim, double half_width, int n) {
    if (dim != 1 && dim != 2)
        throw ConfigError("build_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (!(half_width > 0.0))
        throw ConfigError("build_grid: half_width must be positive");
    if (n < 3) throw ConfigError("build_grid: need n >= 3, got " + std::to_string(n));
    Grid g;
    g.dim = dim;
    g.half_width = half_width;
    g.n = n;
    g.h = 2.0 * half_width / (n + 1);
    return g;
}

Field make_field(const Grid& g, const std::function<double(double, double)>& fn) {
    Field f(g);
    if (g.dim == 1) {
        for (int m = 0; m < g.n; ++m) f.v[m] = fn(g.node_coord(m), 0.0);
    } else {
        for (int mx = 0; mx < g.n; ++mx)
            for (int my = 0; my < g.n; ++my)
                f.v[static_cast<std::size_t>(mx) * g.n + my] =
                    fn(g.node_coord(mx), g.node_coord(my));
    }
    for (double x : f.v)
        if (!std::isfinite(x)) throw NumericalError("make_field: non-finite sample");
    return f;
}

StaggeredField make_staggered(const Grid& g,
                              const std::function<double(int, double, double)>& fn) {
    StaggeredField s(g);
    if (g.dim == 1) {
        for (int i = 0; i <= g.n; ++i) s.axis[0][i] = fn(0, g.iface_coord(i), 0.0);
    } else {
        for (int ix = 0; ix <= g.n; ++ix)
            for (int my = 0; my < g.n; ++my)
                s.axis[0][static_cast<std::size_t>(ix) * g.n + my] =
                    fn(0, g.iface_coord(ix), g.node_coord(my));
        for (int mx = 0; mx < g.n; ++mx)
            for (int iy = 0; iy <= g.n; ++iy)
                s.axis[1][static_cast<std::size_t>(mx) * (g.n + 1) + iy] =
                    fn(1, g.node_coord(mx), g.iface_coord(iy));
    }
    return s;
}

StateZ::StateZ(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {
    require_same_grid(u.grid, v.grid, "StateZ");
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw ShapeError(std::string(where) + ": fields live on different grids");
}

double l2_inner(const Field& u, const Field& w) {
    require_same_grid(u.grid, w.grid, "l2_inner");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.v[i] * w.v[i];
    double cell = u.grid.dim == 1 ? u.grid.h : u.grid.h * u.grid.h;
    return cell * s;
}

double lp_norm(const Field& u, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("lp_norm: need finite p >= 1");
    double s = 0.0;
    for (double x : u.v) s += std::pow(std::abs(x), p);
    double cell = u.grid.dim == 1 ? u.grid.h : u.grid.h * u.grid.h;
    return std::pow(cell * s, 1.0 / p);
}

StaggeredField gradient(const Field& u) {
    const Grid& g = u.grid;
    StaggeredField s(g);
    const double inv_h = 1.0 / g.h;
    if (g.dim == 1) {
        for (int i = 0; i <= g.n; ++i) {
            double left = (i == 0) ? 0.0 : u.v[i - 1];
            double right = (i == g.n) ? 0.0 : u.v[i];
            s.axis[0][i] = (right - left) * inv_h;
        }
    } else {
        const int n = g.n;
        for (int ix = 0; ix <= n; ++ix)
            for (int my = 0; my < n; ++my) {
                double left = (ix == 0) ? 0.0 : u.v[static_cast<std::size_t>(ix - 1) * n + my];
                double right = (ix == n) ? 0.0 : u.v[static_cast<std::size_t>(ix) * n + my];
                s.axis[0][static_cast<std::size_t>(ix) * n + my] = (right - left) * inv_h;
            }
        for (int mx = 0; mx < n; ++mx)
            for (int iy = 0; iy <= n; ++iy) {
                double left = (iy == 0) ? 0.0 : u.v[static_cast<std::size_t>(mx) * n + iy - 1];
                double right = (iy == n) ? 0.0 : u.v[static_cast<std::size_t>(mx) * n + iy];
                s.axis[1][static_cast<std::size_t>(mx) * (n + 1) + iy] = (right - left) * inv_h;
            }
    }
    return s;
}

double staggered_inner(const StaggeredField& a, const StaggeredField& b) {
    require_same_grid(a.grid, b.grid, "staggered_inner");
    double s = 0.0;
    for (int d = 0; d < a.grid.dim; ++d)
        for (std::size_t i = 0; i < a.axis[d].size(); ++i) s += a.axis[d][i] * b.axis[d][i];
    double cell = a.grid.dim == 1 ? a.grid.h : a.grid.h * a.grid.h;
    return cell * s;
}

double staggered_inner_weighted(const StaggeredField& w, const StaggeredField& a,
                                const StaggeredField& b) {
    require_same_grid(w.grid, a.grid, "staggered_inner_weighted");
    require_same_grid(a.grid, b.grid, "staggered_inner_weighted");
    double s = 0.0;
    for (int d = 0; d < a.grid.dim; ++d)
        for (std::size_t i = 0; i < a.axis[d].size(); ++i)
            s += w.axis[d][i] * a.axis[d][i] * b.axis[d][i];
    double cell = a.grid.dim == 1 ? a.grid.h : a.grid.h * a.grid.h;
    return cell * s;
}

double h1_norm(const Field& u) {
    StaggeredField g = gradient(u);
    return std::sqrt(staggered_inner(g, g) + l2_inner(u, u));
}

std::tuple<double, double, double> inner_and_norms(const Field& u, const Field& w, double p) {
    return {l2_inner(u, w), lp_norm(u, p), h1_norm(u)};
}

double lpu_norm(const Field& u, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("lpu_norm: need finite p >= 1");
    const Grid& g = u.grid;
    if (g.h > 1.0)
        throw ResolutionError("lpu_norm: spacing h > 1 cannot resolve unit windows");
    // Nodes within the window satisfy |x_j - x_m| <= 1/2, i.e. |j - m| <= W.
    const int W = static_cast<int>(std::floor(0.5 / g.h + 1e-12));
    double best = 0.0;
    if (g.dim == 1) {
        std::vector<double> prefix(g.n + 1, 0.0);
        for (int i = 0; i < g.n; ++i) prefix[i + 1] = prefix[i] + std::pow(std::abs(u.v[i]), p);
        for (int m = 0; m < g.n; ++m) {
            int lo = std::max(0, m - W);
            int hi = std::min(g.n, m + W + 1);
            best = std::max(best, (prefix[hi] - prefix[lo]) * g.h);
        }
    } else {
        const int n = g.n;
        std::vector<double> prefix(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
        auto P = [&](int i, int j) -> double& {
            return prefix[static_cast<std::size_t>(i) * (n + 1) + j];
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                P(i + 1, j + 1) = std::pow(std::abs(u.v[static_cast<std::size_t>(i) * n + j]), p) +
                                  P(i, j + 1) + P(i + 1, j) - P(i, j);
        for (int mx = 0; mx < n; ++mx)
            for (int my = 0; my < n; ++my) {
                int xlo = std::max(0, mx - W), xhi = std::min(n, mx + W + 1);
                int ylo = std::max(0, my - W), yhi = std::min(n, my + W + 1);
                double sum = P(xhi, yhi) - P(xlo, yhi) - P(xhi, ylo) + P(xlo, ylo);
                best = std::max(best, sum * g.h * g.h);
            }
    }
    return std::pow(best, 1.0 / p);
}

namespace {
double quintic(double t) { return ((6.0 * t - 15.0) * t + 10.0) * t * t * t; }
double quintic_deriv(double t) {
    double s = t * (1.0 - t);
    return 30.0 * s * s;
}
}  // namespace

double thetabar_profile(double s) {
    if (s <= 1.0) return 0.0;
    if (s >= 2.0) return 1.0;
    return quintic(s - 1.0);
}

double thetabar_profile_deriv(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    return quintic_deriv(s - 1.0);
}

double theta_profile(double s) {
    double b = thetabar_profile(s);
    return b * b;
}

double theta_profile_deriv(double s) {
    return 2.0 * thetabar_profile(s) * thetabar_profile_deriv(s);
}

double thetabar_profile_deriv_sup() { return 15.0 / 8.0; }

double theta_profile_deriv_sup() {
    static const double sup = [] {
        const int N = 1 << 20;
        double best = 0.0;
        for (int i = 0; i <= N; ++i) {
            double s = 1.0 + static_cast<double>(i) / N;
            best = std::max(best, std::abs(theta_profile_deriv(s)));
        }
        return best;
    }();
    return sup;
}

Cutoffs cutoffs(const Grid& g, double k) {
    if (!(k > 0.0)) throw ConfigError("cutoffs: need k > 0");
    const double inv_k2 = 1.0 / (k * k);
    auto radius2 = [&](double x, double y) { return g.dim == 1 ? x * x : x * x + y * y; };
    Cutoffs c;
    c.theta_bar = make_field(g, [&](double x, double y) {
        return thetabar_profile(radius2(x, y) * inv_k2);
    });
    c.theta = make_field(g, [&](double x, double y) {
        return theta_profile(radius2(x, y) * inv_k2);
    });
    // grad of profile(|x|^2/k^2) along axis d is profile'(s) * 2 x_d / k^2,
    // sampled analytically at interface coordinates.
    c.grad_theta_bar = make_staggered(g, [&](int axis, double x, double y) {
        double s = radius2(x, y) * inv_k2;
        double coord = axis == 0 ? x : y;
        return thetabar_profile_deriv(s) * 2.0 * coord * inv_k2;
    });
    c.grad_theta = make_staggered(g, [&](int axis, double x, double y) {
        double s = radius2(x, y) * inv_k2;
        double coord = axis == 0 ? x : y;
        return theta_profile_deriv(s) * 2.0 * coord * inv_k2;
    });
    const double two_sqrt2 = 2.0 * std::sqrt(2.0);
    c.C_thetabar = two_sqrt2 * thetabar_profile_deriv_sup();
    c.C_theta = two_sqrt2 * theta_profile_deriv_sup();
    return c;
}

}  // namespace attractorlab
