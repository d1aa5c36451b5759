#include "bsq/eulerian.hpp"

#include <cmath>

#include "bsq/errors.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

namespace {

double mean_of(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / static_cast<double>(f.v.size());
}

VectorField2 biot_savart(const SpectralCoeffs& cw) {
    SpectralCoeffs c1 = cw, c2 = cw;
    // u = (-d2, d1) lap^-1 w:  u1 <- i xi2/|xi|^2,  u2 <- -i xi1/|xi|^2
    const int n = cw.grid.n;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = cw.grid.xi(jy);
        const int ky = cw.grid.wavenumber(jy);
        for (int jx = 0; jx < n; ++jx) {
            const double xi1 = cw.grid.xi(jx);
            const int kx = cw.grid.wavenumber(jx);
            const double xisq = xi1 * xi1 + xi2 * xi2;
            // odd symbols: drop the Nyquist rows along with the mean mode
            if (xisq == 0.0 || kx == -n / 2 || ky == -n / 2) {
                c1.at(jx, jy) = 0.0;
                c2.at(jx, jy) = 0.0;
                continue;
            }
            c1.at(jx, jy) *= std::complex<double>(0.0, xi2 / xisq);
            c2.at(jx, jy) *= std::complex<double>(0.0, -xi1 / xisq);
        }
    }
    return {inverse(c1), inverse(c2)};
}

struct Rhs {
    ScalarField dw;
    ScalarField dth;
    double du2;
};

Rhs eulerian_rhs(const EulerianState& s) {
    const Grid2D& g = s.omega.grid;

    SpectralCoeffs cw = forward(s.omega);
    SpectralCoeffs cth = forward(s.theta);
    SpectralCoeffs cwd = cw, cthd = cth;
    dealias(cwd);
    dealias(cthd);

    VectorField2 u = biot_savart(cwd);
    ScalarField wx = derivative(cwd, 1), wy = derivative(cwd, 2);
    ScalarField tx = derivative(cthd, 1), ty = derivative(cthd, 2);

    ScalarField adv_w(g), adv_th(g);
    const std::size_t m = adv_w.v.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double a = u.x1.v[i] + s.mean_u1;
        const double b = u.x2.v[i] + s.mean_u2;
        adv_w.v[i] = a * wx.v[i] + b * wy.v[i];
        adv_th.v[i] = a * tx.v[i] + b * ty.v[i];
    }

    SpectralCoeffs ca = forward(adv_w);
    SpectralCoeffs cb = forward(adv_th);
    dealias(ca);
    dealias(cb);
    ca.c[0] = 0.0; // vorticity mean stays pinned to zero

    // dw = -dealias(u.grad w) + d1 theta, assembled spectrally.
    const int n = g.n;
    for (int jy = 0; jy < n; ++jy) {
        const int ky = g.wavenumber(jy);
        for (int jx = 0; jx < n; ++jx) {
            const int kx = g.wavenumber(jx);
            std::complex<double> d1th = 0.0;
            if (kx != -n / 2 && ky != -n / 2)
                d1th = std::complex<double>(0.0, g.xi(jx)) * cth.at(jx, jy);
            ca.at(jx, jy) = -ca.at(jx, jy) + d1th;
            cb.at(jx, jy) = -cb.at(jx, jy);
        }
    }

    return {inverse(ca), inverse(cb), mean_of(s.theta)};
}

} // namespace

VectorField2 velocity_from_vorticity(const ScalarField& omega) {
    return biot_savart(forward(omega));
}

VectorField2 eulerian_velocity(const EulerianState& s) {
    VectorField2 u = velocity_from_vorticity(s.omega);
    for (double& x : u.x1.v) x += s.mean_u1;
    for (double& x : u.x2.v) x += s.mean_u2;
    return u;
}

EulerianState solve_eulerian(const VectorField2& u0, const ScalarField& theta0,
                             const EulerianParams& p) {
    if (p.dt <= 0.0 || p.t_end <= 0.0)
        throw ConfigError("dt and t_end must be positive");
    const long long nsteps = std::llround(p.t_end / p.dt);
    if (nsteps < 1 || std::abs(static_cast<double>(nsteps) * p.dt - p.t_end) >
                          1e-9 * std::max(1.0, p.t_end))
        throw ConfigError("t_end must be an integer multiple of dt");

    EulerianState s{curl(u0), theta0, mean_of(u0.x1), mean_of(u0.x2)};

    auto step_state = [](const EulerianState& base, double c, const Rhs& k) {
        EulerianState r = base;
        for (std::size_t i = 0; i < r.omega.v.size(); ++i) {
            r.omega.v[i] += c * k.dw.v[i];
            r.theta.v[i] += c * k.dth.v[i];
        }
        r.mean_u2 += c * k.du2;
        return r;
    };

    for (long long step = 0; step < nsteps; ++step) {
        Rhs k1 = eulerian_rhs(s);
        Rhs k2 = eulerian_rhs(step_state(s, 0.5 * p.dt, k1));
        Rhs k3 = eulerian_rhs(step_state(s, 0.5 * p.dt, k2));
        Rhs k4 = eulerian_rhs(step_state(s, p.dt, k3));
        const double w = p.dt / 6.0;
        for (std::size_t i = 0; i < s.omega.v.size(); ++i) {
            s.omega.v[i] += w * (k1.dw.v[i] + 2.0 * k2.dw.v[i] +
                                 2.0 * k3.dw.v[i] + k4.dw.v[i]);
            s.theta.v[i] += w * (k1.dth.v[i] + 2.0 * k2.dth.v[i] +
                                 2.0 * k3.dth.v[i] + k4.dth.v[i]);
        }
        s.mean_u2 += w * (k1.du2 + 2.0 * k2.du2 + 2.0 * k3.du2 + k4.du2);
    }
    return s;
}

} // namespace bsq
