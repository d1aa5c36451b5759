#pragma once

#include "bsq/field.hpp"

namespace bsq {

// Independent Eulerian reference integrator, vorticity form:
//
//   w_t     = -(u . grad) w + d1 theta
//   theta_t = -(u . grad) theta
//   u       = grad^perp lap^-1 w + U(t),   dU/dt = (0, mean theta)
//
// The mean component U carries the buoyancy drift that the zero-mean
// Biot-Savart part cannot represent.  Products are formed from dealiased
// factors and dealiased again; the vorticity mean mode is pinned to zero at
// every right-hand-side evaluation.

struct EulerianParams {
    double dt = 1e-3;
    double t_end = 1.0;
};

struct EulerianState {
    ScalarField omega;
    ScalarField theta;
    double mean_u1 = 0.0;
    double mean_u2 = 0.0;
};

/// Zero-mean Biot-Savart velocity (-d2, d1) lap^-1 omega.
VectorField2 velocity_from_vorticity(const ScalarField& omega);

/// Full velocity of a state, mean drift included.
VectorField2 eulerian_velocity(const EulerianState& s);

/// Classical RK4 from (curl u0, theta0, mean u0).
EulerianState solve_eulerian(const VectorField2& u0, const ScalarField& theta0,
                             const EulerianParams& p);

} // namespace bsq
