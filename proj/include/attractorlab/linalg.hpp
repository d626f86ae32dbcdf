#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "attractorlab/errors.hpp"

namespace attractorlab {

using MatVec = std::function<void(const std::vector<double>&, std::vector<double>&)>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Conjugate gradients for a symmetric positive definite operator. x carries
// the initial guess on entry. Stops when |r| <= rel_tol * |b|.
inline CgResult cg_solve(const MatVec& apply, const std::vector<double>& b,
                         std::vector<double>& x, double rel_tol, int max_iters) {
    const std::size_t n = b.size();
    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0, true};
    }
    double rr = dot(r, r);
    if (std::sqrt(rr) <= rel_tol * bnorm) return {0, std::sqrt(rr) / bnorm, true};
    p = r;
    CgResult res;
    for (int it = 1; it <= max_iters; ++it) {
        apply(p, ap);
        double pap = dot(p, ap);
        if (!(pap > 0.0) || !std::isfinite(pap))
            throw NumericalError("cg_solve: operator not positive definite");
        double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = dot(r, r);
        res.iterations = it;
        res.relative_residual = std::sqrt(rr_new) / bnorm;
        if (res.relative_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return res;
}

}  // namespace attractorlab
