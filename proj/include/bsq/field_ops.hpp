#pragma once

#include <string>

#include "bsq/spectral.hpp"

namespace bsq {

template <class F>
void fill(ScalarField& f, F&& fn) {
    const int n = f.grid.n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = f.grid.x(iy);
        for (int ix = 0; ix < n; ++ix) f.at(ix, iy) = fn(f.grid.x(ix), y);
    }
}

template <class F>
ScalarField field_from(const Grid2D& g, F&& fn) {
    ScalarField f(g);
    fill(f, fn);
    return f;
}

/// d1 u1 + d2 u2, spectral derivatives.
ScalarField divergence(const VectorField2& u);

/// d1 u2 - d2 u1 (scalar vorticity of a planar field).
ScalarField curl(const VectorField2& u);

/// Perpendicular gradient of a stream function: u = (-d2 psi, d1 psi).
/// Divergence-free by construction (to roundoff).
VectorField2 velocity_from_stream(const ScalarField& psi);

/// Smooth compactly supported mollifier bump
///   exp(-1 / (1 - |x-c|^2/r^2))   on |x-c| < r,  0 outside
/// (periodic distance).  Value e^{-1} at the center.
/// Throws UnresolvableBump when the radius is under two grid cells.
ScalarField bump(const Grid2D& g, double cx, double cy, double radius);

/// amp * exp(-|x-c|^2 / (2 sigma^2)) with periodic distance.
ScalarField gaussian(const Grid2D& g, double cx, double cy, double sigma, double amp);

/// Scale a field so its H^s norm equals target; returns the scaled field.
/// target = 0 gives the zero field; a numerically-zero input throws ZeroField.
ScalarField normalize_hs(const ScalarField& f, double s, double target);
VectorField2 normalize_hs(const VectorField2& u, double s, double target);

/// Named initial data.  "rest": zero state.  "taylor_green": multi-mode
/// perturbed cellular flow, theta = 0.  "bump_theta": the same flow plus a
/// Gaussian temperature anomaly.  Amplitudes are kept small enough that the
/// time-one flow stays deep inside the diffeomorphism guards.
struct InitialData {
    VectorField2 u0;
    ScalarField theta0;
};
InitialData initial_data_preset(const std::string& name, const Grid2D& g);

} // namespace bsq
