#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <new>
#include <vector>

#include "bsq/grid.hpp"

namespace bsq {

// FFTW plans bake alignment assumptions into the plan; executing them on
// differently-aligned buffers is undefined.  Every array that can reach a
// transform is therefore held in a uniformly 64-byte-aligned vector.
template <class T>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <class U> AlignedAlloc(const AlignedAlloc<U>&) {}
    T* allocate(std::size_t m) {
        return static_cast<T*>(::operator new(m * sizeof(T), std::align_val_t(64)));
    }
    void deallocate(T* p, std::size_t) noexcept {
        ::operator delete(p, std::align_val_t(64));
    }
    template <class U> bool operator==(const AlignedAlloc<U>&) const { return true; }
};

using RealVec = std::vector<double, AlignedAlloc<double>>;
using ComplexVec = std::vector<std::complex<double>, AlignedAlloc<std::complex<double>>>;

/// Real scalar field sampled on a Grid2D (row-major, x1 fastest).
struct ScalarField {
    Grid2D grid;
    RealVec v;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& at(int ix, int iy) { return v[static_cast<std::size_t>(iy) * grid.n + ix]; }
    double at(int ix, int iy) const { return v[static_cast<std::size_t>(iy) * grid.n + ix]; }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    ScalarField& operator*=(double a) {
        for (auto& x : v) x *= a;
        return *this;
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }

/// Two-component vector field (velocity, displacement, ...).
struct VectorField2 {
    ScalarField x1, x2;

    VectorField2() = default;
    explicit VectorField2(const Grid2D& g) : x1(g), x2(g) {}
    VectorField2(ScalarField a, ScalarField b) : x1(std::move(a)), x2(std::move(b)) {}

    const Grid2D& grid() const { return x1.grid; }

    VectorField2& operator+=(const VectorField2& o) {
        x1 += o.x1;
        x2 += o.x2;
        return *this;
    }
    VectorField2& operator-=(const VectorField2& o) {
        x1 -= o.x1;
        x2 -= o.x2;
        return *this;
    }
    VectorField2& operator*=(double a) {
        x1 *= a;
        x2 *= a;
        return *this;
    }
    double max_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < x1.v.size(); ++i)
            m = std::max(m, x1.v[i] * x1.v[i] + x2.v[i] * x2.v[i]);
        return std::sqrt(m);
    }
};

inline VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
inline VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
inline VectorField2 operator*(double s, VectorField2 a) { return a *= s; }

/// Fourier coefficients of a real field, full n x n complex storage,
/// normalized so that coeff(0) is the box mean (f_j = sum_k c_k e^{i xi_k x_j}).
struct SpectralCoeffs {
    Grid2D grid;
    ComplexVec c;

    SpectralCoeffs() = default;
    explicit SpectralCoeffs(const Grid2D& g) : grid(g), c(g.size()) {}

    std::complex<double>& at(int jx, int jy) {
        return c[static_cast<std::size_t>(jy) * grid.n + jx];
    }
    std::complex<double> at(int jx, int jy) const {
        return c[static_cast<std::size_t>(jy) * grid.n + jx];
    }
};

} // namespace bsq
