#pragma once

#include <array>
#include <string>
#include <vector>

#include "bsq/lagrangian.hpp"

namespace bsq {

// Non-uniform-dependence experiment: around a base state (u0, theta0), fix an
// H^s-normalized divergence-free probe direction u* with flow-derivative
// constant m > 0 at a marker point x*.  Build data families
//
//   w0(n)  = (u0,        theta0 + theta_n)
//   w0~(n) = (u0 + u*/n, theta0 + theta_n)
//
// where theta_n is a mollifier bump at x* of radius r_n, H^s-normalized to
// R/2.  The input gap ||w0~ - w0||_s = ||u*||_s / n shrinks like 1/n, while
// at time one the two flows shear the bump apart: the marker separation stays
// of order m/n against a bump of radius ~ 1/n, and the output gap in H^s
// stays bounded below.

enum class RadiusRule {
    grid_limited,     // r_n = radius_scale / n, largest 1/n family the grid resolves
    derivative_bound, // r_n = m ||u*||_s / (8 n L), the theoretical choice
};

struct ExperimentConfig {
    double sobolev_s = 3.0;
    double ball_radius = 0.1; // R; bumps are normalized to ||theta_n||_s = R/2
    std::vector<int> n_values{2, 4, 8, 16};
    double probe_x1 = 16.0, probe_x2 = 16.0; // marker x*
    double fd_eps = 1e-4;                    // derivative quotient step
    RadiusRule radius_rule = RadiusRule::grid_limited;
    double radius_scale = 6.0;    // rho in r_n = rho / n
    double lipschitz_safety = 1.1;
    int boundary_samples = 128;   // points on the bump boundary circle
    int threads = 1;              // concurrent per-n solves
    SolverParams solver;          // scheme for the bump-carrying solves
    SolverParams smooth_solver;   // cheaper scheme for smooth auxiliary solves
};

struct ExperimentRecord {
    int n = 0;
    double r_n = 0.0;
    double input_gap = 0.0;  // ||u*||_s / n, measured on the actual difference
    double output_gap = 0.0; // pair norm of Phi(w0~) - Phi(w0) at t = 1
    double separation = 0.0; // |phi~(x*) - phi(x*)|
    double lower_bound_separation = 0.0; // m ||u*||_s / (2n)
    double containment_radius = 0.0;     // image radius of supp theta_n under phi
    double containment_radius_tilde = 0.0;
    bool images_disjoint = false; // separation > sum of containment radii
    double ratio = 0.0;       // ||theta_n o phi^-1||_s / ||theta_n||_s
    double ratio_tilde = 0.0;
    std::string status;       // "ok" | "unresolvable"
};

struct ExperimentSummary {
    double m = 0.0;
    double lipschitz = 0.0;
    double probe_norm = 0.0;       // ||u*||_s
    double base_ratio = 0.0;       // composition ratio along the base flow map
    double c1_band_min = 0.0;      // over all composition ratios incl. base
    double c1_band_max = 0.0;
    double slope_input = 0.0;      // log-log slope of input_gap against n
    double gap_retention = 0.0;    // min_n output_gap(n) / output_gap(n_min)
    double input_fall = 0.0;       // input_gap(n_min) / input_gap(n_max)
    std::vector<int> resolvable;   // n values actually run
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    ExperimentSummary summary;
};

/// Central difference of the time-one flow map in state direction (du, dth),
/// returned as the displacement-difference field
///   [phi(w0 + eps w) - phi(w0 - eps w)] / (2 eps).
VectorField2 flow_derivative_field(const VectorField2& u0, const ScalarField& theta0,
                                   const VectorField2& du, const ScalarField& dth,
                                   double eps, const SolverParams& p);

/// Derivative constant m = |D(x*)| / (2 ||w||_s) from a derivative field.
/// Throws DegenerateDirection below 1e-8.
double estimate_m(const VectorField2& derivative_field, double x1, double x2,
                  double direction_norm);

/// Flow-family Lipschitz estimate: safety * max operator norm of I + grad d.
double estimate_lipschitz(const std::vector<const Diffeo*>& family, double safety);

struct SequenceMember {
    int n = 0;
    double r_n = 0.0;
    bool resolvable = false;
    ScalarField theta_n; // empty when not resolvable
};

/// Bump radii and normalized bumps for every n; grid-unresolvable radii are
/// reported rather than thrown.  `m_over_8L` only enters the
/// derivative_bound rule.
std::vector<SequenceMember> build_sequences(const Grid2D& g,
                                            const ExperimentConfig& cfg,
                                            double m_over_8L);

/// Full experiment around (u0, theta0) with probe u*.
ExperimentResult run_nonuniform(const VectorField2& u0, const ScalarField& theta0,
                                const VectorField2& u_star,
                                const ExperimentConfig& cfg);

/// ||theta o psi||_s / ||theta||_s for one map.
double composition_norm_ratio(const ScalarField& theta, const Diffeo& psi,
                              double s, const CompositionScheme& cs);

// Scaling diagnostics ------------------------------------------------------

struct ScalingResidual {
    double lambda = 0.0;
    double residual = 0.0; // sup-norm state residual of the conjugacy
};

/// Residuals of  Psi^lambda(u0, th0) = Psi^1(lambda u0, lambda^2 th0),
/// integrated with matched step counts (dt scales with the horizon).
std::vector<ScalingResidual> check_scaling(const VectorField2& u0,
                                           const ScalarField& theta0,
                                           const std::vector<double>& lambdas,
                                           const SolverParams& p);

/// Sup-norm residual between the direct solution map at horizon T and the
/// time-one rescaling route.
double scaled_map_residual(const VectorField2& u0, const ScalarField& theta0,
                           double T, const SolverParams& p);

} // namespace bsq
