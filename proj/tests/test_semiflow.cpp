#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"

using namespace attractorlab;
using namespace test_helpers;

namespace {

EvolutionConfig quick(double dt, double T, int every = 1) {
    EvolutionConfig c;
    c.dt = dt;
    c.T = T;
    c.record_every = every;
    c.cg_tol = 1e-12;
    return c;
}

double state_dist(const StateZ& a, const StateZ& b) {
    StateZ d(a.u.grid);
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        d.u.v[i] = a.u.v[i] - b.u.v[i];
        d.v.v[i] = a.v.v[i] - b.v.v[i];
    }
    return z_norm(d);
}

}  // namespace

TEST_CASE("undamped Cayley step preserves the energy scalar product") {
    Grid g = build_grid(1, M_PI / 2.0, 49);
    CoefficientSet c = const_coeffs(g, 1.0, 0.0, 0.0);
    Rng rng(1);
    StateZ z = random_state(g, rng);
    double before = energy_norm(c, z);
    StateZ z2 = linear_step(c, z, 1e-3, 1e-13);
    CHECK(energy_norm(c, z2) == doctest::Approx(before).epsilon(1e-9));

    StateZ zero(g);
    StateZ stepped = linear_step(c, zero, 1e-3);
    CHECK(z_norm(stepped) == 0.0);
}

TEST_CASE("damped Cayley step contracts") {
    Grid g = build_grid(1, M_PI / 2.0, 49);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    Rng rng(2);
    StateZ z = random_state(g, rng);
    for (int s = 0; s < 50; ++s) {
        StateZ z2 = linear_step(c, z, 1e-3, 1e-12);
        CHECK(energy_norm(c, z2) <= energy_norm(c, z) * (1.0 + 1e-9));
        z = z2;
    }
}

TEST_CASE("time reversal with no damping returns the state") {
    Grid g = build_grid(1, 1.0, 39);
    CoefficientSet c = const_coeffs(g, 1.0, 0.0, 0.0);
    Rng rng(3);
    StateZ z = random_state(g, rng);
    StateZ fwd = linear_step(c, z, 1e-3, 1e-13);
    StateZ back = linear_step(c, fwd, -1e-3, 1e-13);
    CHECK(state_dist(back, z) <= 1e-9 * z_norm(z));
}

TEST_CASE("linear step converges at second order") {
    Grid g = build_grid(1, M_PI / 2.0, 31);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.5);
    StateZ z0(g);
    z0.u = make_field(g, [](double x, double) { return std::cos(x); });

    auto march = [&](double dt, double T) {
        StateZ z = z0;
        long long steps = std::llround(T / dt);
        for (long long s = 0; s < steps; ++s) z = linear_step(c, z, dt, 1e-13);
        return z;
    };
    const double T = 0.5;
    StateZ ref = march(T / 4096.0, T);
    double e1 = state_dist(march(T / 64.0, T), ref);
    double e2 = state_dist(march(T / 128.0, T), ref);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("nonlinear kick is exact for constant forcing") {
    Grid g = build_grid(1, 1.0, 9);
    // freeze the linear part so only the kick acts on v
    CoefficientSet c = const_coeffs(g, 2.0, 0.0, 0.0);
    NonlinearitySpec s = make_builtin(g, Field(g, 3.0), Field(g, 0.0), 0.0);
    StateZ z(g);
    double dt = 0.25;
    // Lie step: linear flow of zero state is zero, then v += dt g / eps
    StateZ out = semiflow_step(c, s, z, dt, 1e-12, Scheme::lie);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(out.v.v[i] == doctest::Approx(dt * 3.0 / 2.0).epsilon(1e-12));
}

TEST_CASE("strang splitting of a pure linear flow matches the unsplit step to third order") {
    Grid g = build_grid(1, M_PI / 2.0, 31);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    NonlinearitySpec off = make_builtin(g, Field(g, 0.0), Field(g, 0.0), 0.0);
    StateZ z(g);
    z.u = make_field(g, [](double x, double) { return std::cos(x); });
    z.v = make_field(g, [](double x, double) { return 0.5 * std::cos(3.0 * x); });
    auto local_err = [&](double dt) {
        StateZ split = semiflow_step(c, off, z, dt, 1e-14);
        StateZ whole = linear_step(c, z, dt, 1e-14);
        return state_dist(split, whole);
    };
    double coarse = local_err(2e-2);
    double fine = local_err(1e-2);
    CHECK(coarse / fine > 6.0);  // one-step defect is O(dt^3)
    CHECK(coarse / fine < 10.0);
}

TEST_CASE("nonlinear stepper converges at second order") {
    Grid g = build_grid(1, M_PI / 2.0, 31);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    NonlinearitySpec s = make_builtin(g, Field(g, 0.5), Field(g, 1.0), 2.0);
    StateZ z0(g);
    z0.u = make_field(g, [](double x, double) { return std::cos(x); });

    auto march = [&](double dt, double T) {
        StateZ z = z0;
        long long steps = std::llround(T / dt);
        for (long long st = 0; st < steps; ++st) z = semiflow_step(c, s, z, dt, 1e-13);
        return z;
    };
    const double T = 0.5;
    StateZ ref = march(T / 4096.0, T);
    double e1 = state_dist(march(T / 64.0, T), ref);
    double e2 = state_dist(march(T / 128.0, T), ref);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("evolve: trivial horizon, recording, and exact composition") {
    Grid g = build_grid(1, 1.0, 19);
    CoefficientSet c = const_coeffs(g, 1.0, 1.0, 0.0);
    NonlinearitySpec s = make_builtin(g, Field(g, 0.1), Field(g, 1.0), 2.0);
    Rng rng(6);
    StateZ z0 = random_state(g, rng, 0.5, 2);

    Trajectory t0 = evolve(c, &s, z0, quick(1e-2, 0.0));
    CHECK(t0.times.size() == 1);
    CHECK(t0.times[0] == 0.0);

    Trajectory full = evolve(c, &s, z0, quick(1e-2, 0.4));
    Trajectory part1 = evolve(c, &s, z0, quick(1e-2, 0.25));
    Trajectory part2 = evolve(c, &s, part1.states.back(), quick(1e-2, 0.15));
    const StateZ& a = full.states.back();
    const StateZ& b = part2.states.back();
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(a.u.v[i] == b.u.v[i]);
        CHECK(a.v.v[i] == b.v.v[i]);
    }

    // recorder series align with times
    RecorderList recs;
    recs.emplace_back("normZ", [](const StateZ& z, double) { return z_norm(z); });
    Trajectory rec = evolve(c, &s, z0, quick(1e-2, 0.1, 5), recs);
    CHECK(rec.diagnostics.at("normZ").size() == rec.times.size());
    CHECK(rec.times.size() == 3);  // t = 0, 0.05, 0.1
}

TEST_CASE("anti-dissipative sign blows up and is detected") {
    Grid g = build_grid(1, 1.0, 19);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    NonlinearitySpec s = make_builtin(g, Field(g, 0.0), Field(g, -1.0), 2.0);
    StateZ z0(g);
    z0.u = make_field(g, [](double x, double) { return 5.0 * std::exp(-8.0 * x * x); });
    CHECK_THROWS_AS(evolve(c, &s, z0, quick(1e-3, 50.0)), NumericalError);
}

TEST_CASE("linear decay check on the reference configuration") {
    Grid g = build_grid(1, M_PI / 2.0, 99);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    double lam = principal_eigenvalue(c, 1e-10).value;
    Rates r = select_rates(c, lam, 1.0);
    Rng rng(8);
    for (int trial = 0; trial < 3; ++trial) {
        StateZ z0 = random_state(g, rng, 1.0, 1);
        DecayReport rep = linear_decay_check(c, z0, 5.0, 1e-3, r.mu, 0.02, 20, 1e-11);
        CHECK(rep.pass);
    }
    StateZ zero(g);
    CHECK(linear_decay_check(c, zero, 1.0, 1e-3, r.mu).max_ratio == 0.0);
}

TEST_CASE("energy and phase norms") {
    Grid g = build_grid(1, 1.0, 19);
    CoefficientSet c = const_coeffs(g, 2.0, 1.0, 0.5);
    Rng rng(9);
    Field u = random_field(g, rng), v = random_field(g, rng);
    StateZ uv(u, Field(g, 0.0)), vv(Field(g, 0.0), v);
    CHECK(energy_norm(c, vv) == doctest::Approx(lp_norm(v, 2.0)).epsilon(1e-13));
    CHECK(energy_norm(c, uv) ==
          doctest::Approx(std::sqrt(energy_form(c, u, u) / c.eps)).epsilon(1e-13));

    // norm equivalence constants from the coercivity pair
    double lam = principal_eigenvalue(c, 1e-10).value;
    CoerciveConstants cc = coercive_constants(c, 0.0, lam);
    for (int trial = 0; trial < 50; ++trial) {
        StateZ z = random_state(g, rng);
        double en2 = std::pow(energy_norm(c, z), 2.0);
        double zn2 = std::pow(z_norm(z), 2.0);
        double lo = std::min(cc.c_low / c.eps, 1.0);
        double hi = std::max(cc.C_up / c.eps, 1.0);
        CHECK(en2 >= lo * zn2 * (1.0 - 1e-9));
        CHECK(en2 <= hi * zn2 * (1.0 + 1e-9));
    }
}

TEST_CASE("mild-solution residual") {
    Grid g = build_grid(1, M_PI / 2.0, 15);
    CoefficientSet c = const_coeffs(g, 1.0, 2.0, 0.0);
    Rng rng(10);
    StateZ z0 = random_state(g, rng, 1.0, 2);

    // pure linear flow: the reconstruction is the same composed stepper
    Trajectory lin = evolve(c, nullptr, z0, quick(1e-2, 0.2, 4));
    CHECK(mild_residual(c, nullptr, lin, 4, 4, 1e-12) <= 1e-11);
    CHECK(mild_residual(c, nullptr, lin, 0, 1) == 0.0);

    NonlinearitySpec s = make_builtin(g, Field(g, 0.4), Field(g, 1.0), 2.0);
    auto residual_at = [&](double dt) {
        Trajectory traj = evolve(c, &s, z0, quick(dt, 0.32, 1));
        return mild_residual(c, &s, traj, traj.times.size() - 1, 8, 1e-13);
    };
    double r1 = residual_at(0.04);
    double r2 = residual_at(0.02);
    CHECK(r1 / r2 > 3.0);  // second-order shrinkage
    CHECK(r1 / r2 < 5.5);

    Trajectory few = evolve(c, &s, z0, quick(1e-2, 0.05, 1));
    CHECK_THROWS_AS(mild_residual(c, &s, few, 5, 3, 1e-12), ConfigError);
}
