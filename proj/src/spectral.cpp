#include "bsq/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace bsq {

namespace {

// Process-global plan registry.  Plans are created once per (n, sign) with
// FFTW_ESTIMATE -- deterministic plan choice, so identical runs produce
// bit-identical results.  fftw_execute_dft on distinct arrays is
// thread-safe; creation is serialized.
class PlanRegistry {
public:
    fftw_plan get(int n, int sign) {
        std::scoped_lock lk(mu_);
        auto key = std::pair{n, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        ComplexVec a(static_cast<std::size_t>(n) * n), b(a.size());
        fftw_plan p = fftw_plan_dft_2d(
            n, n, reinterpret_cast<fftw_complex*>(a.data()),
            reinterpret_cast<fftw_complex*>(b.data()), sign, FFTW_ESTIMATE);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanRegistry& registry() {
    static PlanRegistry r;
    return r;
}

void execute(int n, int sign, std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(registry().get(n, sign),
                     reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

SpectralCoeffs forward(const ScalarField& f) {
    const int n = f.grid.n;
    SpectralCoeffs out(f.grid);
    ComplexVec in(f.grid.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = f.v[i];
    execute(n, FFTW_FORWARD, in.data(), out.c.data());
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (auto& z : out.c) z *= scale;
    return out;
}

ScalarField inverse(const SpectralCoeffs& c) {
    const int n = c.grid.n;
    ComplexVec in(c.c), out(c.c.size());
    execute(n, FFTW_BACKWARD, in.data(), out.data());
    ScalarField f(c.grid);
    for (std::size_t i = 0; i < out.size(); ++i) f.v[i] = out[i].real();
    return f;
}

std::complex<double> symbol_inverse_laplacian(double xi1, double xi2) {
    const double q = xi1 * xi1 + xi2 * xi2;
    return q == 0.0 ? 0.0 : -1.0 / q;
}

std::complex<double> symbol_riesz(int k, double xi1, double xi2) {
    const double q = std::sqrt(xi1 * xi1 + xi2 * xi2);
    if (q == 0.0) return 0.0;
    return {0.0, (k == 1 ? xi1 : xi2) / q};
}

std::complex<double> symbol_gradient(int k, double xi1, double xi2) {
    return {0.0, k == 1 ? xi1 : xi2};
}

std::complex<double> symbol_sobolev(double s, double xi1, double xi2) {
    return std::pow(1.0 + xi1 * xi1 + xi2 * xi2, 0.5 * s);
}

std::complex<double> symbol_ball_cutoff(double xi1, double xi2) {
    return (xi1 * xi1 + xi2 * xi2 <= 1.0) ? 1.0 : 0.0;
}

namespace {

// Odd symbols must not touch the Nyquist row; field-level wrappers below
// zero it explicitly.
bool nyquist(const Grid2D& g, int jx, int jy) {
    return g.wavenumber(jx) == -g.n / 2 || g.wavenumber(jy) == -g.n / 2;
}

template <class F>
ScalarField apply_field(const ScalarField& f, F&& sym, bool zero_nyquist) {
    SpectralCoeffs c = forward(f);
    const int n = c.grid.n;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = c.grid.xi(jy);
        for (int jx = 0; jx < n; ++jx) {
            auto& z = c.at(jx, jy);
            if (zero_nyquist && nyquist(c.grid, jx, jy))
                z = 0.0;
            else
                z *= sym(c.grid.xi(jx), xi2);
        }
    }
    return inverse(c);
}

} // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    return apply_field(
        f, [axis](double x1, double x2) { return symbol_gradient(axis, x1, x2); }, true);
}

ScalarField derivative(const SpectralCoeffs& c, int axis) {
    SpectralCoeffs d = c;
    const int n = d.grid.n;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = d.grid.xi(jy);
        for (int jx = 0; jx < n; ++jx) {
            auto& z = d.at(jx, jy);
            if (nyquist(d.grid, jx, jy))
                z = 0.0;
            else
                z *= symbol_gradient(axis, d.grid.xi(jx), xi2);
        }
    }
    return inverse(d);
}

ScalarField inverse_laplacian(const ScalarField& f) {
    return apply_field(f, symbol_inverse_laplacian, false);
}

ScalarField riesz(const ScalarField& f, int k) {
    return apply_field(
        f, [k](double x1, double x2) { return symbol_riesz(k, x1, x2); }, true);
}

bool mode_in_dealias_band(const Grid2D& g, int jx, int jy) {
    const int kx = g.wavenumber(jx), ky = g.wavenumber(jy);
    // keep |k| <= n/3, i.e. zero |k| > n/3
    return 3 * std::abs(kx) <= g.n && 3 * std::abs(ky) <= g.n;
}

void dealias(SpectralCoeffs& c) {
    const int n = c.grid.n;
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx)
            if (!mode_in_dealias_band(c.grid, jx, jy)) c.at(jx, jy) = 0.0;
}

ScalarField dealias(const ScalarField& f) {
    SpectralCoeffs c = forward(f);
    dealias(c);
    return inverse(c);
}

double sobolev_norm(const SpectralCoeffs& c, double s) {
    const int n = c.grid.n;
    double acc = 0.0;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = c.grid.xi(jy);
        for (int jx = 0; jx < n; ++jx) {
            const double xi1 = c.grid.xi(jx);
            const double w = (s == 0.0) ? 1.0 : std::pow(1.0 + xi1 * xi1 + xi2 * xi2, s);
            acc += w * std::norm(c.at(jx, jy));
        }
    }
    return c.grid.box_length * std::sqrt(acc);
}

double sobolev_norm(const ScalarField& f, double s) { return sobolev_norm(forward(f), s); }

double sobolev_norm(const VectorField2& u, double s) {
    return std::max(sobolev_norm(u.x1, s), sobolev_norm(u.x2, s));
}

double pair_norm(const VectorField2& u, const ScalarField& theta, double s) {
    return std::max(sobolev_norm(u, s), sobolev_norm(theta, s));
}

double l2_norm(const ScalarField& f) {
    // h^2 sum f^2 -- identical to sobolev_norm(f, 0) by Parseval, without
    // the transform.
    double acc = 0.0;
    for (double x : f.v) acc += x * x;
    return f.grid.h() * std::sqrt(acc);
}

double l2_norm(const VectorField2& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.x1.v.size(); ++i)
        acc += u.x1.v[i] * u.x1.v[i] + u.x2.v[i] * u.x2.v[i];
    return u.grid().h() * std::sqrt(acc);
}

ScalarField upsample(const ScalarField& f, int factor) {
    if (factor == 1) return f;
    const int n = f.grid.n, m = n * factor;
    SpectralCoeffs c = forward(f);
    Grid2D fine(m, f.grid.box_length);
    SpectralCoeffs cf(fine);
    // The coarse Nyquist mode k = -n/2 is self-conjugate; on the fine grid
    // it splits evenly between +n/2 and -n/2 so the padded spectrum stays
    // conjugate-symmetric and coarse-node samples are reproduced exactly.
    auto targets = [&](int k, int t[2]) -> int {
        if (2 * k == -n) {
            t[0] = m - n / 2;
            t[1] = n / 2;
            return 2;
        }
        t[0] = k >= 0 ? k : k + m;
        return 1;
    };
    for (int jy = 0; jy < n; ++jy) {
        int ty[2];
        const int cy = targets(f.grid.wavenumber(jy), ty);
        for (int jx = 0; jx < n; ++jx) {
            int tx[2];
            const int cx = targets(f.grid.wavenumber(jx), tx);
            const auto z = c.at(jx, jy) * (1.0 / (cx * cy));
            for (int a = 0; a < cy; ++a)
                for (int b = 0; b < cx; ++b)
                    cf.c[static_cast<std::size_t>(ty[a]) * m + tx[b]] += z;
        }
    }
    return inverse(cf);
}

} // namespace bsq
