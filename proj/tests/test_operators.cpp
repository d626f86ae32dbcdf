#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"

using namespace attractorlab;
using namespace test_helpers;

namespace {

CoefficientSet variable_coeffs(const Grid& g) {
    return make_coefficients(
        g, 1.0, [](double, double) { return 2.0; },
        [](double x, double y) { return 0.3 * std::sin(x + 0.5 * y); },
        [](int axis, double x, double y) {
            return 1.0 + 0.4 * std::cos(x + (axis ? 0.7 : 0.2) * y);
        });
}

}  // namespace

TEST_CASE("discrete Green identity, both dims") {
    for (int dim : {1, 2}) {
        Grid g = build_grid(dim, 1.5, dim == 1 ? 41 : 13);
        CoefficientSet c = variable_coeffs(g);
        Rng rng(100 + dim);
        for (int trial = 0; trial < 20; ++trial) {
            Field u = random_field(g, rng), w = random_field(g, rng);
            Field lu = apply_elliptic(c, u);
            double lhs = l2_inner(lu, w);
            double rhs = staggered_inner_weighted(c.a, gradient(u), gradient(w));
            CHECK(std::abs(lhs + rhs) <= 1e-12 * h1_norm(u) * h1_norm(w));
        }
    }
}

TEST_CASE("elliptic operator symmetry") {
    Grid g = build_grid(2, 1.0, 9);
    CoefficientSet c = variable_coeffs(g);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = random_field(g, rng), w = random_field(g, rng);
        double a = l2_inner(apply_elliptic(c, u), w);
        double b = l2_inner(apply_elliptic(c, w), u);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("unit-coefficient eigenpair is exact for the shifted sine") {
    Grid g = build_grid(1, M_PI / 2.0, 31);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    Field u = make_field(g, [](double x, double) { return std::cos(x); });
    Field lu = apply_elliptic(c, u);
    double lam = stencil_eigenvalue(g.h, g.n);
    for (int m = 0; m < g.n; ++m)
        CHECK(lu.v[m] == doctest::Approx(-lam * u.v[m]).epsilon(1e-11));

    Field zero(g, 0.0);
    Field lz = apply_elliptic(c, zero);
    for (double v : lz.v) CHECK(v == 0.0);
}

TEST_CASE("energy form matches the eigenvalue on the ground state") {
    Grid g = build_grid(1, M_PI / 2.0, 41);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    Field u = make_field(g, [](double x, double) { return std::cos(x); });
    double lam = stencil_eigenvalue(g.h, g.n);
    CHECK(energy_form(c, u, u) == doctest::Approx(lam * l2_inner(u, u)).epsilon(1e-12));
    Field zero(g, 0.0);
    CHECK(energy_form(c, u, zero) == 0.0);
    CHECK(h1_inner(c, u, u) == doctest::Approx(energy_form(c, u, u) / c.eps));
}

TEST_CASE("principal eigenvalue: discrete spectrum, shifts, and 2D tensor sum") {
    Grid g = build_grid(1, M_PI / 2.0, 61);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    EigenResult e = principal_eigenvalue(c, 1e-12);
    double lam = stencil_eigenvalue(g.h, g.n);
    CHECK(e.value == doctest::Approx(lam).epsilon(1e-10));
    // Rayleigh certificate
    CHECK(energy_form(c, e.field, e.field) / l2_inner(e.field, e.field) ==
          doctest::Approx(e.value).epsilon(1e-10));

    // spectral shift by a constant potential
    CoefficientSet cb = const_coeffs(g, 1.0, 1.0, 2.5);
    CHECK(principal_eigenvalue(cb, 1e-12).value == doctest::Approx(lam + 2.5).epsilon(1e-10));

    // negative potential: eigenvalue goes negative, solver still converges
    CoefficientSet cn = const_coeffs(g, 1.0, 1.0, -10.0);
    CHECK(principal_eigenvalue(cn, 1e-10).value == doctest::Approx(lam - 10.0).epsilon(1e-8));

    Grid g2 = build_grid(2, M_PI / 2.0, 15);
    CoefficientSet c2 = const_coeffs(g2, 1.0, 1.0, 0.0);
    double lam1d = stencil_eigenvalue(g2.h, g2.n);
    CHECK(principal_eigenvalue(c2, 1e-12).value == doctest::Approx(2.0 * lam1d).epsilon(1e-9));
}

TEST_CASE("form bound constant: forced identities and the pencil oracle") {
    Grid g = build_grid(1, 1.0, 9);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 1.75);
    CHECK(form_bound_constant(c, 0.0) == doctest::Approx(1.75).epsilon(1e-12));

    CoefficientSet c0 = const_coeffs(g, 1.0, 1.0, 0.0);
    for (double eb : {1e-3, 0.1, 1.0}) CHECK(form_bound_constant(c0, eb) == 0.0);

    // narrow bump potential: compare against dense eigenvalues of
    // T = diag(|beta|) - eb (K+I), and check monotone decrease in eb.
    CoefficientSet cb = make_coefficients(
        g, 1.0, [](double, double) { return 1.0; },
        [](double x, double) { return 5.0 * std::exp(-40.0 * x * x); },
        [](int, double, double) { return 1.0; });
    double prev = 1e300;
    for (double eb : {1e-4, 1e-2, 0.1, 0.5}) {
        double got = form_bound_constant(cb, eb, 1e-13);
        auto dense = dense_of(g.size(), [&](const std::vector<double>& x, std::vector<double>& y) {
            Field xf(g);
            xf.v = x;
            Field lap = apply_elliptic(const_coeffs(g, 1.0, 1.0, 0.0), xf);
            for (std::size_t i = 0; i < x.size(); ++i)
                y[i] = std::abs(cb.beta.v[i]) * x[i] - eb * (-lap.v[i] + x[i]);
        });
        double expect = std::max(0.0, jacobi_eigenvalues(dense).back());
        CHECK(got == doctest::Approx(expect).epsilon(1e-7));
        CHECK(got <= prev + 1e-12);
        prev = got;
    }
}

TEST_CASE("coercive constants: analytic case and the sandwich property") {
    Grid g = build_grid(1, M_PI / 2.0, 99);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    double lam = principal_eigenvalue(c, 1e-12).value;
    CoerciveConstants cc = coercive_constants(c, 0.0, lam);
    // best c in the formula at C_eb = 0: rho = lam/(1+lam) about 1/2
    CHECK(cc.c_low == doctest::Approx(0.5 * lam).epsilon(0.05));
    CHECK(cc.C_up >= 1.0);

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        Field u = random_field(g, rng);
        double grad2 = staggered_inner(gradient(u), gradient(u));
        double mass = l2_inner(u, u);
        double form = energy_form(c, u, u) - cc.kappa * mass;
        double scale = grad2 + mass;
        CHECK(form >= cc.c_low * scale - 1e-10 * scale);
        CHECK(form <= cc.C_up * scale + 1e-10 * scale);
    }

    CHECK_THROWS_AS(coercive_constants(c, lam, lam), HypothesisError);
    CHECK_THROWS_AS(coercive_constants(c, 2.0 * lam, lam), HypothesisError);
}

TEST_CASE("coercive sandwich with a variable potential") {
    Grid g = build_grid(1, 2.0, 79);
    CoefficientSet c = make_coefficients(
        g, 1.0, [](double, double) { return 1.0; },
        [](double x, double) { return 2.0 + std::sin(3.0 * x); },
        [](int, double, double) { return 1.0; });
    double lam = principal_eigenvalue(c, 1e-12).value;
    CHECK(lam > 0.0);
    CoerciveConstants cc = coercive_constants(c, 0.3 * lam, lam);
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Field u = random_field(g, rng);
        double grad2 = staggered_inner(gradient(u), gradient(u));
        double mass = l2_inner(u, u);
        double form = energy_form(c, u, u) - cc.kappa * mass;
        double scale = grad2 + mass;
        CHECK(form >= cc.c_low * scale - 1e-10 * scale);
        CHECK(form <= cc.C_up * scale + 1e-10 * scale);
    }
}

TEST_CASE("weight operator bounds") {
    Grid g = build_grid(1, M_PI / 2.0, 49);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 1.0);  // beta = 1
    Field zero(g, 0.0);
    WeightOperatorBounds wb = weight_operator_bounds(c, zero);
    double lam0 = stencil_eigenvalue(g.h, g.n);  // beta-free ground state
    CHECK(wb.Lbeta == doctest::Approx(std::sqrt(1.0 / (1.0 + lam0))).epsilon(1e-8));
    CHECK(wb.La == 0.0);

    Field four(g, 4.0), one(g, 1.0);
    double la4 = weight_operator_bounds(c, four).La;
    double la1 = weight_operator_bounds(c, one).La;
    CHECK(la4 == doctest::Approx(2.0 * la1).epsilon(1e-8));
}

TEST_CASE("embedding constant estimate") {
    Grid g = build_grid(1, M_PI / 2.0, 49);
    double lam0 = stencil_eigenvalue(g.h, g.n);
    double c2 = embedding_constant(g, 2.0, 3, 911);
    CHECK(c2 <= 1.0 + 1e-9);
    CHECK(c2 == doctest::Approx(std::sqrt(1.0 / (1.0 + lam0))).epsilon(1e-3));

    // any sample is a valid lower bound; more restarts never lose ground
    double q = 4.0;
    double few = embedding_constant(g, q, 2, 77);
    double more = embedding_constant(g, q, 4, 77);
    CHECK(more >= few - 1e-15);

    Field bump = make_field(g, [](double x, double) { return std::exp(-4.0 * x * x); });
    double sample_ratio = lp_norm(bump, q) / h1_norm(bump);
    CHECK(more >= sample_ratio - 1e-6);
}

TEST_CASE("dual norm via the stationary solve") {
    Grid g = build_grid(1, M_PI / 2.0, 61);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    EigenResult e = principal_eigenvalue(c, 1e-12);
    double lam = e.value;
    // eigenfield w of S with eigenvalue lam: |w|_{-1} = sqrt(eps/lam) |w|_L2
    Field w = e.field;
    double expect = std::sqrt(1.0 / lam) * lp_norm(w, 2.0);
    CHECK(hminus1_norm(c, w, 1e-12) == doctest::Approx(expect).epsilon(1e-8));

    // cos ground profile: |w|_L2^2 ~ pi/2 up to O(h^2)
    Field cosf = make_field(g, [](double x, double) { return std::cos(x); });
    double got = hminus1_norm(c, cosf, 1e-12);
    CHECK(got == doctest::Approx(std::sqrt(M_PI / 2.0 / lam)).epsilon(1e-3));

    Field zero(g, 0.0);
    CHECK(hminus1_norm(c, zero) == 0.0);

    // |S y|_{-1} = sqrt(eps * <y, S y>) on random y
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        Field y = random_field(g, rng);
        Field sy(g);
        apply_S(c, y.v, sy.v);
        double lhs = hminus1_norm(c, sy, 1e-13);
        double rhs = std::sqrt(c.eps * l2_inner(y, sy));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("rate selection formulas and admissibility") {
    Grid g = build_grid(1, M_PI / 2.0, 9);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    Rates r = select_rates(c, 1.0, 1.0);
    CHECK(r.mu == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(r.delta == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.nu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(2.0 * r.mu <= std::min({1.0, c.alpha0 / (2.0 * c.eps), 1.0 / (c.eps + c.alpha1)}));
    CHECK(1.0 - r.delta * c.alpha1 > 0.0);
    CHECK(c.alpha0 - 2.0 * r.delta * c.eps >= 0.0);

    CHECK_THROWS_AS(select_rates(c, -1.0, 1.0), HypothesisError);
    CHECK_THROWS_AS(select_rates(c, 1.0, 0.0), HypothesisError);
    CoefficientSet und = const_coeffs(g, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(select_rates(und, 1.0, 1.0), HypothesisError);
}

TEST_CASE("interface averaging of node coefficients") {
    Grid g = build_grid(1, 1.0, 5);
    Field nodes = make_field(g, [](double x, double) { return 2.0 + x; });
    CoefficientSet c = make_coefficients(g, 1.0, Field(g, 1.0), Field(g, 0.0), nodes);
    for (int i = 1; i < g.n; ++i)
        CHECK(c.a.axis[0][i] ==
              doctest::Approx(2.0 + 0.5 * (g.node_coord(i - 1) + g.node_coord(i))));
    CHECK(c.a.axis[0][0] == doctest::Approx(nodes.v[0]));
    CHECK(c.a.axis[0][g.n] == doctest::Approx(nodes.v[g.n - 1]));

    Field bad = make_field(g, [](double x, double) { return x; });  // negative on half
    CHECK_THROWS_AS(make_coefficients(g, 1.0, Field(g, 1.0), Field(g, 0.0), bad),
                    HypothesisError);
}
