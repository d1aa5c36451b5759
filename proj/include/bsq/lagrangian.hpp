#pragma once

#include <vector>

#include "bsq/diffeo.hpp"
#include "bsq/field.hpp"

namespace bsq {

// Lagrangian (flow-map) formulation of the inviscid 2D Boussinesq system on
// the periodic box.  The state is (phi, v) with phi the flow map and
// v = dphi/dt the Lagrangian velocity; the temperature is carried as the
// parameter theta0 through the transport identity theta(t) = theta0 o phi^-1.
//
//   dphi/dt = v
//   dv/dt   = [grad B](u, u) o phi  -  [lap^-1 grad d2 theta] o phi  +  (0, theta0)
//
// with u = v o phi^-1, theta = theta0 o phi^-1, and grad B the
// frequency-split pressure quadratic form (see compute_grad_B).

struct LagrangianState {
    Diffeo phi;
    VectorField2 v;
};

struct SolverParams {
    double dt = 1e-3;
    double t_end = 1.0;
    double sobolev_s = 3.0;   // s for the H^s diagnostics
    int save_stride = 100;    // steps between diagnostic samples / snapshots
    int guard_stride = 100;   // steps between jacobian guards
    double invert_tol = 1e-10;
    int invert_max_iter = 100;
    double cfl_fraction = 0.5;     // trip when max|v| dt > fraction * h
    double blowup_grad = 0.9;      // trip when max |grad d| entry reaches this
    double max_initial_div = 1e-10;
    bool enforce_initial_div = true;
    bool store_snapshots = true;
    CompositionScheme comp = {};   // used by solver stages and measurements
};

struct TrajectorySample {
    double t;
    double div_u_l2;  // || div(v o phi^-1) ||_L2, chain-rule evaluation
    double u_l2;
    double u_hs;
    double theta_hs;
    double min_det;   // min det(I + grad d)
    double max_speed; // max |v|
};

struct Snapshot {
    double t;
    LagrangianState state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<Snapshot> snapshots; // at save times when store_snapshots, else final only
    const LagrangianState& final_state() const { return snapshots.back().state; }
};

/// Frequency-split pressure gradient: with q1 = sum_ij didj(ui uj) and
/// q2 = sum_ij (di uj)(dj ui), both formed from dealiased products,
///
///   grad B = grad lap^-1 [ chi(D) q1 + (1 - chi(D)) q2 ],
///
/// chi(D) the sharp cutoff to the closed unit frequency ball.  The two
/// quadratic forms agree on divergence-free fields, so the split equals the
/// unsplit grad lap^-1 q2 there (checked by tests to 1e-12).
VectorField2 compute_grad_B(const VectorField2& u);

/// Unsplit form grad lap^-1 sum_ij (di uj)(dj ui) -- reference for the
/// equivalence check.
VectorField2 compute_grad_B_unsplit(const VectorField2& u);

/// Buoyancy pressure correction -lap^-1 grad d2 theta, one multiplier pass
/// (symbol  -xi_k xi_2 / |xi|^2, zero mean mode).
VectorField2 buoyancy_pressure(const ScalarField& theta);

/// Right-hand side of the flow-map system at state (phi, v).
/// `warm_inverse` carries the displacement of the previous inverse as the
/// fixed-point seed; it is updated in place.
void lagrangian_rhs(const LagrangianState& s, const ScalarField& theta0,
                    const SolverParams& p, VectorField2* warm_inverse,
                    VectorField2& dphi, VectorField2& dv);

/// Integrate with classical RK4 from (phi = id, v = u0).
/// Errors: CflViolation, BlowupDetected, NoConvergence, SymmetryViolation
/// (initial divergence above tolerance).
Trajectory solve(const VectorField2& u0, const ScalarField& theta0,
                 const SolverParams& p);

/// Eulerian observables of a state: u = v o phi^-1, theta = theta0 o phi^-1.
struct Observables {
    VectorField2 u;
    ScalarField theta;
};
Observables observe(const LagrangianState& s, const ScalarField& theta0,
                    const SolverParams& p);

/// Solution map at t_end: (u(T), theta(T)) plus the final state.
struct SolutionMapOutput {
    VectorField2 u;
    ScalarField theta;
    LagrangianState state;
};
SolutionMapOutput solution_map(const VectorField2& u0, const ScalarField& theta0,
                               const SolverParams& p);

/// Same map computed through the time-1 rescaling route:
///   Phi_T(u0, th0) = (Phi1(T u0, T^2 th0)/T,  Phi2(T u0, T^2 th0)/T^2)
/// integrated to time 1 with the step count matched to the direct route.
SolutionMapOutput scaled_solution_map(const VectorField2& u0, const ScalarField& theta0,
                                      double T, SolverParams p);

/// Chain-rule divergence of v o phi^-1:
///   div(x) = sum_ik (dk v_i)(psi(x)) di psi_k(x).
/// Avoids spectral differentiation of interpolated samples.
ScalarField composed_divergence(const LagrangianState& s, const SolverParams& p);

} // namespace bsq
