#pragma once

#include <span>
#include <vector>

#include "bsq/field.hpp"

namespace bsq {

// Periodic local Lagrange interpolation on equispaced stencils.
//
// order 3: 4-point bicubic, exact on cubics, O(h^4).
// order 5/7: 6/8-point tensor stencils for compositions that must resolve
// fields near the grid scale (used together with spectral upsampling).
//
// Evaluation at a grid node returns the stored value exactly.

/// Evaluate several fields (all on the same grid) at a shared list of
/// points; stencil weights are computed once per point.
void eval_points(std::span<const ScalarField* const> fields,
                 std::span<const double> px, std::span<const double> py,
                 int order, std::span<double* const> out);

double eval_at(const ScalarField& f, double x, double y, int order = 3);

/// Direct trigonometric summation (exact Fourier interpolation) -- the slow
/// verification oracle, O(n^2) per point.
double eval_at_fourier(const ScalarField& f, double x, double y);

} // namespace bsq
