#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"

using namespace attractorlab;
using test_helpers::random_field;

TEST_CASE("build_grid basics") {
    Grid g = build_grid(1, M_PI / 2.0, 3);
    CHECK(g.h == doctest::Approx(M_PI / 4.0).epsilon(1e-15));
    CHECK(g.node_coord(0) == doctest::Approx(-M_PI / 4.0));
    CHECK(g.node_coord(1) == doctest::Approx(0.0));
    CHECK(g.node_coord(2) == doctest::Approx(M_PI / 4.0));

    Grid g2 = build_grid(2, 1.0, 3);
    CHECK(g2.size() == 9);
    CHECK(g2.h == doctest::Approx(0.5));

    CHECK_THROWS_AS(build_grid(1, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(build_grid(3, 1.0, 5), ConfigError);
    CHECK_THROWS_AS(build_grid(1, -1.0, 5), ConfigError);
}

TEST_CASE("grid symmetry under reflection") {
    Grid g = build_grid(1, 2.0, 7);
    for (int m = 0; m < g.n; ++m)
        CHECK(g.node_coord(m) == doctest::Approx(-g.node_coord(g.n - 1 - m)).epsilon(1e-14));
}

TEST_CASE("inner products and norms") {
    // cos(x) on (-pi/2, pi/2): integral of cos^2 is pi/2.
    Grid g = build_grid(1, M_PI / 2.0, 401);
    Field u = make_field(g, [](double x, double) { return std::cos(x); });
    auto [inner, lp, h1] = inner_and_norms(u, u, 2.0);
    CHECK(inner == doctest::Approx(M_PI / 2.0).epsilon(1e-4));
    CHECK(lp == doctest::Approx(std::sqrt(inner)).epsilon(1e-13));
    CHECK(h1 > lp);  // gradient contribution strictly positive

    Field zero(g, 0.0);
    auto [zi, zl, zh] = inner_and_norms(zero, zero, 3.0);
    CHECK(zi == 0.0);
    CHECK(zl == 0.0);
    CHECK(zh == 0.0);

    Grid other = build_grid(1, 1.0, 401);
    Field w(other);
    CHECK_THROWS_AS(l2_inner(u, w), ShapeError);
}

TEST_CASE("quadrature determinism") {
    Grid g = build_grid(2, 1.0, 9);
    Rng rng(7);
    Field u = random_field(g, rng), w = random_field(g, rng);
    double first = l2_inner(u, w);
    for (int i = 0; i < 5; ++i) CHECK(l2_inner(u, w) == first);
}

TEST_CASE("gradient of constants, linears, and indicators") {
    Grid g = build_grid(1, 1.0, 9);
    Field c(g, 3.0);
    StaggeredField gc = gradient(c);
    CHECK(gc.axis[0][0] == doctest::Approx(3.0 / g.h));
    CHECK(gc.axis[0][g.n] == doctest::Approx(-3.0 / g.h));
    for (int i = 1; i < g.n; ++i) CHECK(gc.axis[0][i] == 0.0);

    Field lin = make_field(g, [](double x, double) { return 2.5 * x; });
    StaggeredField gl = gradient(lin);
    for (int i = 1; i < g.n; ++i) CHECK(gl.axis[0][i] == doctest::Approx(2.5).epsilon(1e-13));

    Field ind(g, 0.0);
    ind.v[4] = 1.0;
    StaggeredField gi = gradient(ind);
    CHECK(gi.axis[0][4] == doctest::Approx(1.0 / g.h));
    CHECK(gi.axis[0][5] == doctest::Approx(-1.0 / g.h));
}

TEST_CASE("uniformly local norm: constants and indicators") {
    Grid g = build_grid(1, 8.0, 399);
    Field one(g, 1.0);
    CHECK(lpu_norm(one, 2.0) == doctest::Approx(1.0).epsilon(2.0 * g.h));

    // indicator of [0, 2]: the best unit window fits inside, mass 1.
    Field ind = make_field(g, [](double x, double) { return (x >= 0.0 && x <= 2.0) ? 1.0 : 0.0; });
    CHECK(lpu_norm(ind, 1.0) == doctest::Approx(1.0).epsilon(2.0 * g.h));

    Field zero(g, 0.0);
    CHECK(lpu_norm(zero, 1.0) == 0.0);

    Grid coarse = build_grid(1, 10.0, 3);  // h = 5 > 1
    Field f(coarse, 1.0);
    CHECK_THROWS_AS(lpu_norm(f, 2.0), ResolutionError);
}

TEST_CASE("uniformly local norm never exceeds the global norm") {
    for (int dim : {1, 2}) {
        Grid g = build_grid(dim, 3.0, dim == 1 ? 49 : 19);
        Rng rng(42 + dim);
        for (int trial = 0; trial < 10; ++trial) {
            Field u = random_field(g, rng);
            double p = 1.0 + 2.0 * rng.uniform01();
            CHECK(lpu_norm(u, p) <= lp_norm(u, p) * (1.0 + 1e-12));
        }
        // support inside one window: equality
        Field bump(g, 0.0);
        bump.v[g.size() / 2] = 2.0;
        CHECK(lpu_norm(bump, 2.0) == doctest::Approx(lp_norm(bump, 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("uniformly local norm agrees with brute-force window scan") {
    Grid g = build_grid(1, 2.0, 15);
    Rng rng(3);
    Field u = random_field(g, rng);
    double best = 0.0;
    for (int m = 0; m < g.n; ++m) {
        double sum = 0.0;
        for (int j = 0; j < g.n; ++j)
            if (std::abs(g.node_coord(j) - g.node_coord(m)) <= 0.5 + 1e-12)
                sum += std::abs(u.v[j]) * g.h;
        best = std::max(best, sum);
    }
    CHECK(lpu_norm(u, 1.0) == doctest::Approx(best).epsilon(1e-13));
}

TEST_CASE("cutoff profile values and constants") {
    Grid g = build_grid(1, 10.0, 199);
    double k = 4.0;
    Cutoffs c = cutoffs(g, k);
    for (int m = 0; m < g.n; ++m) {
        double ax = std::abs(g.node_coord(m));
        if (ax <= k) CHECK(c.theta.v[m] == 0.0);
        if (ax >= std::sqrt(2.0) * k) CHECK(c.theta.v[m] == 1.0);
        CHECK(c.theta.v[m] ==
              doctest::Approx(c.theta_bar.v[m] * c.theta_bar.v[m]).epsilon(1e-15));
    }
    // s = (1.5k)^2/k^2 = 2.25 lies in the flat region
    CHECK(thetabar_profile(2.25) == 1.0);
    CHECK(theta_profile(1.0) == 0.0);

    CHECK(c.C_thetabar == doctest::Approx(2.0 * std::sqrt(2.0) * 15.0 / 8.0).epsilon(1e-15));
    CHECK(c.C_thetabar == doctest::Approx(5.3033).epsilon(1e-4));
    // theta' = 2 thetabar thetabar' <= 2 * 1 * 15/8
    CHECK(c.C_theta <= 2.0 * c.C_thetabar);
    CHECK(c.C_theta > 0.0);
    CHECK_THROWS_AS(cutoffs(g, 0.0), ConfigError);
}

TEST_CASE("cutoff gradients are analytic profile samples") {
    Grid g = build_grid(1, 10.0, 99);
    double k = 5.0;
    Cutoffs c = cutoffs(g, k);
    for (int i = 0; i <= g.n; ++i) {
        double x = g.iface_coord(i);
        double expected = thetabar_profile_deriv(x * x / (k * k)) * 2.0 * x / (k * k);
        CHECK(c.grad_theta_bar.axis[0][i] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("cutoff monotonicity in k") {
    Grid g = build_grid(2, 9.0, 25);
    Cutoffs small = cutoffs(g, 3.0), large = cutoffs(g, 5.5);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(large.theta.v[i] <= small.theta.v[i]);
}
