#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <numbers>

#include "bsq/errors.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/lagrangian.hpp"
#include "oracles.hpp"

using namespace bsq;
constexpr double pi = std::numbers::pi;

namespace {

// Cellular flow with stream sin(kx) sin(ky): the pressure gradient has the
// closed form (k^3/2) (sin 2kx, sin 2ky), derived by hand convolution of the
// quadratic form.
void check_cellular_grad_B(double box) {
    Grid2D g{128, box};
    const double k = 2.0 * pi / box;
    ScalarField psi = field_from(g, [k](double x, double y) {
        return std::sin(k * x) * std::sin(k * y);
    });
    VectorField2 u = velocity_from_stream(psi);
    VectorField2 gb = compute_grad_B(u);
    VectorField2 exact{field_from(g, [k](double x, double) {
                           return 0.5 * k * k * k * std::sin(2.0 * k * x);
                       }),
                       field_from(g, [k](double, double y) {
                           return 0.5 * k * k * k * std::sin(2.0 * k * y);
                       })};
    exact -= gb;
    CHECK(exact.max_norm() <= 1e-12 * std::max(1.0, k * k * k));
}

} // namespace

TEST_CASE("pressure gradient closed form, low-frequency branch") {
    check_cellular_grad_B(32.0); // product modes sit inside the unit ball
}

TEST_CASE("pressure gradient closed form, high-frequency branch") {
    check_cellular_grad_B(2.0 * pi); // product modes sit outside the unit ball
}

TEST_CASE("split and unsplit pressure forms agree on div-free fields") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        Grid2D g{64, seed % 2 ? 32.0 : 2.0 * pi};
        VectorField2 u = oracle::random_divfree(g, 7, seed, 0.8);
        VectorField2 a = compute_grad_B(u);
        VectorField2 b = compute_grad_B_unsplit(u);
        b -= a;
        CHECK(b.max_norm() <= 1e-12 * std::max(1.0, a.max_norm()));
    }
}

TEST_CASE("buoyancy pressure closed forms") {
    Grid2D g{64, 2.0 * pi};
    // theta = sin(x2): the correction exactly cancels the buoyancy column
    ScalarField t2 = field_from(g, [](double, double y) { return std::sin(y); });
    VectorField2 p2 = buoyancy_pressure(t2);
    CHECK(p2.x1.max_abs() <= 1e-13);
    ScalarField expect = t2;
    expect += p2.x2;
    CHECK(expect.max_abs() <= 1e-12);

    // theta = sin(x1): no x2-frequency content, the term vanishes
    ScalarField t1 = field_from(g, [](double x, double) { return std::sin(x); });
    VectorField2 p1 = buoyancy_pressure(t1);
    CHECK(p1.x1.max_abs() <= 1e-13);
    CHECK(p1.x2.max_abs() <= 1e-13);
}

TEST_CASE("hydrostatic data stay at rest") {
    // u0 = 0, theta = sin(k x2): buoyancy and its pressure correction cancel,
    // so the flow map must remain the identity
    Grid2D g{32, 2.0 * pi};
    ScalarField th = field_from(g, [](double, double y) { return 0.3 * std::sin(y); });
    SolverParams p;
    p.dt = 5e-3;
    p.t_end = 0.2;
    p.store_snapshots = false;
    Trajectory traj = solve(VectorField2(g), th, p);
    const LagrangianState& s = traj.final_state();
    CHECK(s.phi.displacement().max_norm() <= 1e-12);
    CHECK(s.v.max_norm() <= 1e-12);
}

TEST_CASE("uniform buoyancy accelerates the mean flow") {
    // theta = const: no pressure response, v = (0, theta t), phi the drift
    Grid2D g{32, 2.0 * pi};
    ScalarField th(g, 0.04);
    SolverParams p;
    p.dt = 5e-3;
    p.t_end = 0.5;
    p.store_snapshots = false;
    Trajectory traj = solve(VectorField2(g), th, p);
    const LagrangianState& s = traj.final_state();
    CHECK(std::abs(s.v.x2.v[7] - 0.04 * 0.5) <= 1e-12);
    CHECK(std::abs(s.phi.displacement().x2.v[7] - 0.5 * 0.04 * 0.25) <= 1e-12);
    CHECK(s.v.x1.max_abs() <= 1e-14);
}

TEST_CASE("divergence stays small along a smooth trajectory") {
    Grid2D g{64, 2.0 * pi};
    InitialData data = initial_data_preset("bump_theta", g);
    SolverParams p;
    p.dt = 2e-3;
    p.t_end = 0.1;
    p.save_stride = 10;
    Trajectory traj = solve(data.u0, data.theta0, p);
    // the diagnostic is interpolation-limited; this coarse grid only needs
    // to stay well under the large-grid level checked elsewhere
    for (const TrajectorySample& s : traj.samples) {
        CAPTURE(s.t);
        CHECK(s.div_u_l2 <= 5e-4 * std::max(s.u_l2, 1e-12));
        CHECK(s.min_det > 0.9);
    }
}

TEST_CASE("transported temperature composes back to the datum") {
    Grid2D g{64, 2.0 * pi};
    InitialData data = initial_data_preset("bump_theta", g);
    SolverParams p;
    p.dt = 2e-3;
    p.t_end = 0.2;
    p.store_snapshots = false;
    Trajectory traj = solve(data.u0, data.theta0, p);
    const LagrangianState& s = traj.final_state();
    Observables obs = observe(s, data.theta0, p);
    ScalarField back = compose(obs.theta, s.phi, p.comp);
    back -= data.theta0;
    // two interpolations at this resolution; large grids do much better
    CHECK(l2_norm(back) <= 2e-3 * l2_norm(data.theta0));
}

TEST_CASE("norms stay within a mild band on a short horizon") {
    Grid2D g{64, 2.0 * pi};
    InitialData data = initial_data_preset("bump_theta", g);
    SolverParams p;
    p.dt = 2e-3;
    p.t_end = 0.2;
    p.save_stride = 20;
    p.store_snapshots = false;
    Trajectory traj = solve(data.u0, data.theta0, p);
    const double th0 = traj.samples.front().theta_hs;
    for (const TrajectorySample& s : traj.samples) {
        CHECK(s.theta_hs <= 1.3 * th0);
        CHECK(s.theta_hs >= th0 / 1.3);
        CHECK(s.u_hs <= 2.0 * std::max(traj.samples.front().u_hs, 0.05));
    }
}

TEST_CASE("time scaling conjugacy is exact for dyadic factors") {
    Grid2D g{32, 2.0 * pi};
    InitialData data = initial_data_preset("taylor_green", g);
    SolverParams p;
    p.dt = 4e-3;
    p.t_end = 1.0;
    p.store_snapshots = false;

    for (double lam : {0.5, 2.0}) {
        SolverParams pa = p;
        pa.t_end = lam;
        pa.dt = lam * p.dt;
        Trajectory ta = solve(data.u0, data.theta0, pa);
        VectorField2 su = data.u0;
        su *= lam;
        ScalarField sth = data.theta0;
        sth *= lam * lam;
        Trajectory tb = solve(su, sth, p);
        VectorField2 dphi = tb.final_state().phi.displacement();
        dphi -= ta.final_state().phi.displacement();
        VectorField2 dv = tb.final_state().v;
        VectorField2 va = ta.final_state().v;
        va *= lam;
        dv -= va;
        CAPTURE(lam);
        CHECK(dphi.max_norm() <= 1e-13);
        CHECK(dv.max_norm() <= 1e-13 * lam);
    }
}

TEST_CASE("rescaled route reproduces the direct map") {
    Grid2D g{32, 2.0 * pi};
    InitialData data = initial_data_preset("taylor_green", g);
    SolverParams p;
    p.dt = 4e-3;
    SolverParams pd = p;
    pd.t_end = 0.5;
    pd.store_snapshots = false;
    SolutionMapOutput direct = solution_map(data.u0, data.theta0, pd);
    SolutionMapOutput scaled = scaled_solution_map(data.u0, data.theta0, 0.5, p);
    VectorField2 du = scaled.u;
    du -= direct.u;
    ScalarField dth = scaled.theta;
    dth -= direct.theta;
    CHECK(du.max_norm() <= 1e-12);
    CHECK(dth.max_abs() <= 1e-12);
}

TEST_CASE("solver guards") {
    Grid2D g{32, 2.0 * pi};
    SolverParams p;
    p.dt = 2e-3;
    p.t_end = 0.1;

    SUBCASE("CFL violation") {
        ScalarField psi = field_from(g, [](double x, double y) {
            return 60.0 * std::sin(x) * std::sin(y);
        });
        CHECK_THROWS_AS(solve(velocity_from_stream(psi), ScalarField(g), p),
                        CflViolation);
    }
    SUBCASE("blowup guard wiring") {
        InitialData data = initial_data_preset("taylor_green", g);
        SolverParams q = p;
        q.guard_stride = 1;
        q.blowup_grad = 1e-9; // any real motion must trip the guard
        CHECK_THROWS_AS(solve(data.u0, data.theta0, q), BlowupDetected);
    }
    SUBCASE("initial divergence precondition") {
        ScalarField f = oracle::random_band_limited(g, 3, 5u, 0.1);
        VectorField2 grad{derivative(f, 1), derivative(f, 2)};
        CHECK_THROWS_AS(solve(grad, ScalarField(g), p), SymmetryViolation);
        SolverParams q = p;
        q.enforce_initial_div = false;
        CHECK_NOTHROW(solve(grad, ScalarField(g), q));
    }
    SUBCASE("dt grid mismatch") {
        SolverParams q = p;
        q.dt = 3e-3; // 0.1 is not an integer multiple
        CHECK_THROWS_AS(solve(VectorField2(g), ScalarField(g), q), ConfigError);
    }
}

TEST_CASE("repeated solves are bitwise identical") {
    Grid2D g{32, 2.0 * pi};
    InitialData data = initial_data_preset("bump_theta", g);
    SolverParams p;
    p.dt = 5e-3;
    p.t_end = 0.05;
    p.store_snapshots = false;
    Trajectory a = solve(data.u0, data.theta0, p);
    Trajectory b = solve(data.u0, data.theta0, p);
    const RealVec& da = a.final_state().phi.displacement().x1.v;
    const RealVec& db = b.final_state().phi.displacement().x1.v;
    CHECK(std::memcmp(da.data(), db.data(), da.size() * sizeof(double)) == 0);
}
