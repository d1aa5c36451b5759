#include "bsq/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bsq/errors.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

namespace {

// ---- small state algebra helpers (RK4 combinations) ----

void add_scaled(VectorField2& dst, double c, const VectorField2& src) {
    const std::size_t m = dst.x1.v.size();
    for (std::size_t i = 0; i < m; ++i) dst.x1.v[i] += c * src.x1.v[i];
    for (std::size_t i = 0; i < m; ++i) dst.x2.v[i] += c * src.x2.v[i];
}

VectorField2 combined(const VectorField2& a, double c, const VectorField2& b) {
    VectorField2 r = a;
    add_scaled(r, c, b);
    return r;
}

VectorField2 scaled_copy(const VectorField2& a, double c) {
    VectorField2 r = a;
    for (double& x : r.x1.v) x *= c;
    for (double& x : r.x2.v) x *= c;
    return r;
}

ScalarField scaled_copy(const ScalarField& a, double c) {
    ScalarField r = a;
    for (double& x : r.v) x *= c;
    return r;
}

VectorField2 grad_B_impl(const VectorField2& u, bool split) {
    const Grid2D& g = u.x1.grid;
    const int n = g.n;

    SpectralCoeffs cu1 = forward(u.x1);
    SpectralCoeffs cu2 = forward(u.x2);
    dealias(cu1);
    dealias(cu2);

    // Band-limited velocity and its four derivatives in physical space.
    ScalarField u1b = inverse(cu1);
    ScalarField u2b = inverse(cu2);
    ScalarField d1u1 = derivative(cu1, 1);
    ScalarField d2u1 = derivative(cu1, 2);
    ScalarField d1u2 = derivative(cu2, 1);
    ScalarField d2u2 = derivative(cu2, 2);

    // Pointwise quadratics.
    ScalarField p11(g), p12(g), p22(g), q2(g);
    const std::size_t m = u1b.v.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double a = u1b.v[i], b = u2b.v[i];
        p11.v[i] = a * a;
        p12.v[i] = a * b;
        p22.v[i] = b * b;
        q2.v[i] = d1u1.v[i] * d1u1.v[i] + d2u2.v[i] * d2u2.v[i] +
                  2.0 * d1u2.v[i] * d2u1.v[i];
    }

    SpectralCoeffs c11 = forward(p11);
    SpectralCoeffs c12 = forward(p12);
    SpectralCoeffs c22 = forward(p22);
    SpectralCoeffs cq = forward(q2);

    SpectralCoeffs o1(g), o2(g);
    for (int jy = 0; jy < n; ++jy) {
        const int ky = g.wavenumber(jy);
        const double xi2 = g.xi(jy);
        for (int jx = 0; jx < n; ++jx) {
            const int kx = g.wavenumber(jx);
            const std::size_t idx = static_cast<std::size_t>(jy) * n + jx;
            if ((kx == 0 && ky == 0) || !mode_in_dealias_band(g, jx, jy)) {
                o1.c[idx] = 0.0;
                o2.c[idx] = 0.0;
                continue;
            }
            const double xi1 = g.xi(jx);
            const double xisq = xi1 * xi1 + xi2 * xi2;
            std::complex<double> q;
            if (split) {
                const bool low = xisq <= 1.0; // closed unit ball kept in chi
                if (low) {
                    // sum_ij didj(ui uj): symbol -xi_i xi_j on the product spectra
                    q = -(xi1 * xi1 * c11.c[idx] + 2.0 * xi1 * xi2 * c12.c[idx] +
                          xi2 * xi2 * c22.c[idx]);
                } else {
                    q = cq.c[idx];
                }
            } else {
                q = cq.c[idx];
            }
            // grad lap^-1: component l gets (i xi_l) * (-1/|xi|^2)
            const std::complex<double> base = q * (-1.0 / xisq);
            o1.c[idx] = std::complex<double>(0.0, xi1) * base;
            o2.c[idx] = std::complex<double>(0.0, xi2) * base;
        }
    }
    return {inverse(o1), inverse(o2)};
}

} // namespace

VectorField2 compute_grad_B(const VectorField2& u) { return grad_B_impl(u, true); }

VectorField2 compute_grad_B_unsplit(const VectorField2& u) {
    return grad_B_impl(u, false);
}

VectorField2 buoyancy_pressure(const ScalarField& theta) {
    SpectralCoeffs c = forward(theta);
    SpectralCoeffs o2 = c; // copy before o1 is scaled in place
    apply_multiplier(c, [](double xi1, double xi2) {
        const double xisq = xi1 * xi1 + xi2 * xi2;
        return xisq == 0.0 ? 0.0 : -xi1 * xi2 / xisq;
    });
    apply_multiplier(o2, [](double xi1, double xi2) {
        const double xisq = xi1 * xi1 + xi2 * xi2;
        return xisq == 0.0 ? 0.0 : -xi2 * xi2 / xisq;
    });
    return {inverse(c), inverse(o2)};
}

void lagrangian_rhs(const LagrangianState& s, const ScalarField& theta0,
                    const SolverParams& p, VectorField2* warm_inverse,
                    VectorField2& dphi, VectorField2& dv) {
    const Grid2D& g = theta0.grid;

    Diffeo psi = invert(s.phi, p.invert_tol, p.invert_max_iter,
                        warm_inverse ? warm_inverse : nullptr);
    if (warm_inverse) *warm_inverse = psi.displacement();

    // u = v o psi, theta = theta0 o psi in one batch (shared stencils).
    ScalarField u1(g), u2(g), theta(g);
    {
        const ScalarField* in[3] = {&s.v.x1, &s.v.x2, &theta0};
        ScalarField* out[3] = {&u1, &u2, &theta};
        compose_many(std::span<const ScalarField* const>(in, 3), psi, p.comp,
                     std::span<ScalarField* const>(out, 3));
    }

    VectorField2 G = compute_grad_B({u1, u2});
    VectorField2 P = buoyancy_pressure(theta);

    // Pull both pressure terms back along phi in one batch.
    ScalarField g1(g), g2(g), b1(g), b2(g);
    {
        const ScalarField* in[4] = {&G.x1, &G.x2, &P.x1, &P.x2};
        ScalarField* out[4] = {&g1, &g2, &b1, &b2};
        compose_many(std::span<const ScalarField* const>(in, 4), s.phi, p.comp,
                     std::span<ScalarField* const>(out, 4));
    }

    dphi = s.v;
    dv.x1 = std::move(g1);
    dv.x2 = std::move(g2);
    const std::size_t m = dv.x1.v.size();
    for (std::size_t i = 0; i < m; ++i) dv.x1.v[i] += b1.v[i];
    for (std::size_t i = 0; i < m; ++i) dv.x2.v[i] += b2.v[i] + theta0.v[i];
}

ScalarField composed_divergence(const LagrangianState& s, const SolverParams& p) {
    const Grid2D& g = s.v.x1.grid;
    Diffeo psi = invert(s.phi, p.invert_tol, p.invert_max_iter, nullptr);

    SpectralCoeffs cv1 = forward(s.v.x1);
    SpectralCoeffs cv2 = forward(s.v.x2);
    ScalarField d1v1 = derivative(cv1, 1);
    ScalarField d2v1 = derivative(cv1, 2);
    ScalarField d1v2 = derivative(cv2, 1);
    ScalarField d2v2 = derivative(cv2, 2);

    ScalarField a11(g), a21(g), a12(g), a22(g);
    {
        const ScalarField* in[4] = {&d1v1, &d2v1, &d1v2, &d2v2};
        ScalarField* out[4] = {&a11, &a21, &a12, &a22};
        compose_many(std::span<const ScalarField* const>(in, 4), psi, p.comp,
                     std::span<ScalarField* const>(out, 4));
    }

    // div(v o psi) = sum_ik (dk v_i)(psi) di psi_k,  psi = id + e.
    DiffeoJacobian J = jacobian(psi);
    ScalarField div(g);
    const std::size_t m = div.v.size();
    for (std::size_t i = 0; i < m; ++i) {
        div.v[i] = a11.v[i] * (1.0 + J.d1d1.v[i]) + a21.v[i] * J.d1d2.v[i] +
                   a12.v[i] * J.d2d1.v[i] + a22.v[i] * (1.0 + J.d2d2.v[i]);
    }
    return div;
}

Observables observe(const LagrangianState& s, const ScalarField& theta0,
                    const SolverParams& p) {
    const Grid2D& g = theta0.grid;
    Diffeo psi = invert(s.phi, p.invert_tol, p.invert_max_iter, nullptr);
    ScalarField u1(g), u2(g), theta(g);
    const ScalarField* in[3] = {&s.v.x1, &s.v.x2, &theta0};
    ScalarField* out[3] = {&u1, &u2, &theta};
    compose_many(std::span<const ScalarField* const>(in, 3), psi, p.comp,
                 std::span<ScalarField* const>(out, 3));
    return {{std::move(u1), std::move(u2)}, std::move(theta)};
}

Trajectory solve(const VectorField2& u0, const ScalarField& theta0,
                 const SolverParams& p) {
    const Grid2D& g = theta0.grid;
    if (u0.x1.grid.n != g.n || u0.x1.grid.box_length != g.box_length)
        throw ConfigError("velocity and temperature grids differ");
    if (p.dt <= 0.0 || p.t_end <= 0.0)
        throw ConfigError("dt and t_end must be positive");

    const long long nsteps = std::llround(p.t_end / p.dt);
    if (nsteps < 1 || std::abs(static_cast<double>(nsteps) * p.dt - p.t_end) >
                          1e-9 * std::max(1.0, p.t_end))
        throw ConfigError("t_end must be an integer multiple of dt");

    if (p.enforce_initial_div) {
        const double d0 = l2_norm(divergence(u0));
        if (d0 > p.max_initial_div) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "initial velocity divergence %.3e exceeds %.3e", d0,
                          p.max_initial_div);
            throw SymmetryViolation(buf);
        }
    }

    const double h = g.box_length / g.n;
    VectorField2 d(g); // phi displacement
    VectorField2 v = u0;
    VectorField2 warm(g);

    Trajectory traj;

    auto guard = [&](double t) {
        Diffeo phi(d);
        DiffeoJacobian J = jacobian(phi);
        const double mg = max_grad_entry(J);
        const double mindet = phi.min_jacobian_det();
        if (mg >= p.blowup_grad || mindet <= 0.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "t=%.6f: max |grad d| = %.4f, min det = %.4e", t, mg,
                          mindet);
            throw BlowupDetected(buf);
        }
    };

    auto record = [&](double t) {
        LagrangianState s{Diffeo(d), v};
        TrajectorySample smp;
        smp.t = t;
        smp.div_u_l2 = l2_norm(composed_divergence(s, p));
        Observables obs = observe(s, theta0, p);
        smp.u_l2 = std::max(l2_norm(obs.u.x1), l2_norm(obs.u.x2));
        smp.u_hs = std::max(sobolev_norm(obs.u.x1, p.sobolev_s),
                            sobolev_norm(obs.u.x2, p.sobolev_s));
        smp.theta_hs = sobolev_norm(obs.theta, p.sobolev_s);
        smp.min_det = s.phi.min_jacobian_det();
        smp.max_speed = v.max_norm();
        traj.samples.push_back(smp);
        if (p.store_snapshots) traj.snapshots.push_back({t, std::move(s)});
    };

    record(0.0);

    VectorField2 k1p(g), k1v(g), k2p(g), k2v(g);
    VectorField2 k3p(g), k3v(g), k4p(g), k4v(g);

    for (long long step = 0; step < nsteps; ++step) {
        const double t = static_cast<double>(step) * p.dt;
        const double vmax = v.max_norm();
        if (vmax * p.dt > p.cfl_fraction * h) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "t=%.6f: max speed %.4e breaks CFL bound %.4e", t,
                          vmax, p.cfl_fraction * h / p.dt);
            throw CflViolation(buf);
        }

        lagrangian_rhs({Diffeo(d), v}, theta0, p, &warm, k1p, k1v);
        lagrangian_rhs({Diffeo(combined(d, 0.5 * p.dt, k1p)),
                        combined(v, 0.5 * p.dt, k1v)},
                       theta0, p, &warm, k2p, k2v);
        lagrangian_rhs({Diffeo(combined(d, 0.5 * p.dt, k2p)),
                        combined(v, 0.5 * p.dt, k2v)},
                       theta0, p, &warm, k3p, k3v);
        lagrangian_rhs({Diffeo(combined(d, p.dt, k3p)), combined(v, p.dt, k3v)},
                       theta0, p, &warm, k4p, k4v);

        const double w = p.dt / 6.0;
        const std::size_t m = d.x1.v.size();
        for (std::size_t i = 0; i < m; ++i) {
            d.x1.v[i] += w * (k1p.x1.v[i] + 2.0 * k2p.x1.v[i] +
                              2.0 * k3p.x1.v[i] + k4p.x1.v[i]);
            d.x2.v[i] += w * (k1p.x2.v[i] + 2.0 * k2p.x2.v[i] +
                              2.0 * k3p.x2.v[i] + k4p.x2.v[i]);
            v.x1.v[i] += w * (k1v.x1.v[i] + 2.0 * k2v.x1.v[i] +
                              2.0 * k3v.x1.v[i] + k4v.x1.v[i]);
            v.x2.v[i] += w * (k1v.x2.v[i] + 2.0 * k2v.x2.v[i] +
                              2.0 * k3v.x2.v[i] + k4v.x2.v[i]);
        }

        const long long done = step + 1;
        const double tnow = static_cast<double>(done) * p.dt;
        if (done % p.guard_stride == 0 || done == nsteps) guard(tnow);
        if (done % p.save_stride == 0 || done == nsteps) record(tnow);
    }

    if (!p.store_snapshots)
        traj.snapshots.push_back({p.t_end, {Diffeo(d), v}});
    return traj;
}

SolutionMapOutput solution_map(const VectorField2& u0, const ScalarField& theta0,
                               const SolverParams& p) {
    SolverParams q = p;
    q.store_snapshots = false;
    Trajectory traj = solve(u0, theta0, q);
    LagrangianState s = traj.final_state();
    Observables obs = observe(s, theta0, p);
    return {std::move(obs.u), std::move(obs.theta), std::move(s)};
}

SolutionMapOutput scaled_solution_map(const VectorField2& u0,
                                      const ScalarField& theta0, double T,
                                      SolverParams p) {
    if (T <= 0.0) throw ConfigError("scaling horizon must be positive");
    long long nsteps = std::llround(T / p.dt);
    if (nsteps < 1) nsteps = 1;
    p.dt = 1.0 / static_cast<double>(nsteps);
    p.t_end = 1.0;
    VectorField2 su0 = scaled_copy(u0, T);
    ScalarField sth0 = scaled_copy(theta0, T * T);
    SolutionMapOutput out = solution_map(su0, sth0, p);
    const double invT = 1.0 / T;
    for (double& x : out.u.x1.v) x *= invT;
    for (double& x : out.u.x2.v) x *= invT;
    const double invT2 = invT * invT;
    for (double& x : out.theta.v) x *= invT2;
    return out;
}

} // namespace bsq
