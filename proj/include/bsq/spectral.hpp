#pragma once

#include <complex>
#include <utility>

#include "bsq/field.hpp"

namespace bsq {

// Discrete Fourier conventions
// ----------------------------
// forward:  c_k = (1/n^2) sum_j f_j e^{-i xi_k . x_j}    (c_0 = box mean)
// inverse:  f_j = sum_k c_k e^{+i xi_k . x_j}
//
// Parseval then reads  h^2 sum_j f_j^2 = L^2 sum_k |c_k|^2, so the Sobolev
// norm below reproduces the grid L^2 norm at s = 0.
//
// Derivative-like (odd) symbols zero the Nyquist row k = -n/2: that mode
// cannot carry a conjugate-symmetric image under an odd multiplier.

SpectralCoeffs forward(const ScalarField& f);
ScalarField inverse(const SpectralCoeffs& c);

/// Apply a per-mode multiplier symbol(xi1, xi2) in place.
template <class F>
void apply_multiplier(SpectralCoeffs& c, F&& symbol) {
    const int n = c.grid.n;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = c.grid.xi(jy);
        auto* row = c.c.data() + static_cast<std::size_t>(jy) * n;
        for (int jx = 0; jx < n; ++jx)
            row[jx] *= symbol(c.grid.xi(jx), xi2);
    }
}

// Named symbols.  All zero the xi = 0 mode where the continuum operator is
// defined only modulo constants (inverse Laplacian, Riesz).
std::complex<double> symbol_inverse_laplacian(double xi1, double xi2);
std::complex<double> symbol_riesz(int k, double xi1, double xi2);
std::complex<double> symbol_gradient(int k, double xi1, double xi2);
std::complex<double> symbol_sobolev(double s, double xi1, double xi2);
/// Sharp indicator of the closed unit ball |xi| <= 1.
std::complex<double> symbol_ball_cutoff(double xi1, double xi2);

// Field-level conveniences (forward, multiply, inverse).
ScalarField derivative(const ScalarField& f, int axis); // axis 1 or 2
/// Same, starting from coefficients already in hand.
ScalarField derivative(const SpectralCoeffs& c, int axis);
ScalarField inverse_laplacian(const ScalarField& f);
ScalarField riesz(const ScalarField& f, int k);

/// Zero every mode with |k_x| > n/3 or |k_y| > n/3 (2/3-rule).
void dealias(SpectralCoeffs& c);
ScalarField dealias(const ScalarField& f);
bool mode_in_dealias_band(const Grid2D& g, int jx, int jy);

// Sobolev norms with Parseval normalization: s = 0 is the grid L^2 norm.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const SpectralCoeffs& c, double s);
/// Vector fields and (u, theta) pairs take the max of component norms.
double sobolev_norm(const VectorField2& u, double s);
double pair_norm(const VectorField2& u, const ScalarField& theta, double s);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField2& u);

/// Spectral zero-padding by an integer factor: exact trigonometric
/// upsampling onto the (factor*n)^2 grid.
ScalarField upsample(const ScalarField& f, int factor);

} // namespace bsq
