#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "attractorlab/diagnostics.hpp"
#include "attractorlab/nemitski.hpp"
#include "attractorlab/operators.hpp"
#include "attractorlab/rng.hpp"
#include "attractorlab/semiflow.hpp"

namespace test_helpers {

using namespace attractorlab;

inline Field random_field(const Grid& g, Rng& rng, double amp = 1.0, int smooth = 0) {
    Field f(g);
    for (auto& v : f.v) v = amp * rng.symmetric();
    const int n = g.n;
    Field tmp(g);
    for (int p = 0; p < smooth; ++p) {
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
    return f;
}

inline StateZ random_state(const Grid& g, Rng& rng, double amp = 1.0, int smooth = 0) {
    return StateZ(random_field(g, rng, amp, smooth), random_field(g, rng, amp, smooth));
}

inline CoefficientSet const_coeffs(const Grid& g, double eps, double alpha, double beta,
                                   double a = 1.0) {
    return make_coefficients(
        g, eps, [&](double, double) { return alpha; }, [&](double, double) { return beta; },
        [&](int, double, double) { return a; });
}

// Dense symmetric eigenvalues by cyclic Jacobi; the brute-force oracle.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> A) {
    const std::size_t n = A.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                double theta = 0.5 * (A[q][q] - A[p][p]) / A[p][q];
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = A[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

inline std::vector<std::vector<double>> dense_of(
    std::size_t n, const std::function<void(const std::vector<double>&, std::vector<double>&)>& op) {
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        op(e, col);
        for (std::size_t i = 0; i < n; ++i) A[i][j] = col[i];
    }
    return A;
}

// Composite Simpson quadrature of a scalar function on [0, u].
inline double simpson(const std::function<double(double)>& f, double u, int panels) {
    if (u == 0.0) return 0.0;
    double h = u / (2.0 * panels);
    double s = f(0.0) + f(u);
    for (int i = 1; i < 2 * panels; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Discrete Dirichlet eigenvalue of the unit 3-point stencil with n interior
// nodes and spacing h: (4/h^2) sin^2(mode pi / (2(n+1))).
inline double stencil_eigenvalue(double h, int n, int mode = 1) {
    double s = std::sin(mode * M_PI / (2.0 * (n + 1)));
    return 4.0 / (h * h) * s * s;
}

}  // namespace test_helpers
