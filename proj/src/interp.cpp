#include "bsq/interp.hpp"

#include <cmath>

#include "bsq/errors.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

namespace {

// Lagrange weights on the integer stencil {-m, ..., m+1}, m = (P-1)/2,
// for a local coordinate t in [0,1) measured from node 0.
template <int P>
struct Stencil {
    static constexpr int N = P + 1;
    static constexpr int M = (P - 1) / 2;

    static constexpr std::array<double, N> inv_den() {
        std::array<double, N> d{};
        for (int i = 0; i < N; ++i) {
            double prod = 1.0;
            for (int j = 0; j < N; ++j)
                if (j != i) prod *= double(i - j);
            d[i] = 1.0 / prod;
        }
        return d;
    }

    static void weights(double t, double* w) {
        static constexpr std::array<double, N> inv = inv_den();
        double diff[N], pre[N], suf[N];
        for (int i = 0; i < N; ++i) diff[i] = t - double(i - M);
        pre[0] = 1.0;
        for (int i = 1; i < N; ++i) pre[i] = pre[i - 1] * diff[i - 1];
        suf[N - 1] = 1.0;
        for (int i = N - 2; i >= 0; --i) suf[i] = suf[i + 1] * diff[i + 1];
        for (int i = 0; i < N; ++i) w[i] = pre[i] * suf[i] * inv[i];
    }
};

struct CellCoord {
    int base;
    double t;
};

// Split a physical coordinate into (cell index, fractional offset), snapping
// offsets within 1e-12 of a node so node evaluations stay exact.
inline CellCoord locate(double x, double inv_h, int n) {
    const double g = x * inv_h;
    double fl = std::floor(g);
    double t = g - fl;
    if (t < 1e-12) {
        t = 0.0;
    } else if (t > 1.0 - 1e-12) {
        t = 0.0;
        fl += 1.0;
    }
    long b = static_cast<long>(fl) % n;
    if (b < 0) b += n;
    return {static_cast<int>(b), t};
}

template <int P>
void eval_points_impl(std::span<const ScalarField* const> fields,
                      std::span<const double> px, std::span<const double> py,
                      std::span<double* const> out) {
    constexpr int N = P + 1;
    constexpr int M = Stencil<P>::M;
    const Grid2D& g = fields[0]->grid;
    const int n = g.n;
    const double inv_h = n / g.box_length;
    const bool pow2 = (n & (n - 1)) == 0;
    const int mask = n - 1;
    const std::size_t nf = fields.size();

    double wx[N], wy[N];
    int ix[N], iy[N];
    for (std::size_t p = 0; p < px.size(); ++p) {
        const auto cx = locate(px[p], inv_h, n);
        const auto cy = locate(py[p], inv_h, n);
        Stencil<P>::weights(cx.t, wx);
        Stencil<P>::weights(cy.t, wy);
        if (pow2) {
            for (int i = 0; i < N; ++i) {
                ix[i] = (cx.base + i - M) & mask;
                iy[i] = (cy.base + i - M) & mask;
            }
        } else {
            for (int i = 0; i < N; ++i) {
                ix[i] = (cx.base + i - M + n) % n;
                iy[i] = (cy.base + i - M + n) % n;
            }
        }
        for (std::size_t f = 0; f < nf; ++f) {
            const double* v = fields[f]->v.data();
            double acc = 0.0;
            for (int j = 0; j < N; ++j) {
                const double* row = v + static_cast<std::size_t>(iy[j]) * n;
                double rowacc = 0.0;
                for (int i = 0; i < N; ++i) rowacc += wx[i] * row[ix[i]];
                acc += wy[j] * rowacc;
            }
            out[f][p] = acc;
        }
    }
}

} // namespace

void eval_points(std::span<const ScalarField* const> fields,
                 std::span<const double> px, std::span<const double> py,
                 int order, std::span<double* const> out) {
    if (fields.empty()) return;
    switch (order) {
        case 3: eval_points_impl<3>(fields, px, py, out); break;
        case 5: eval_points_impl<5>(fields, px, py, out); break;
        case 7: eval_points_impl<7>(fields, px, py, out); break;
        default: throw ConfigError("eval_points: order must be 3, 5 or 7");
    }
}

double eval_at(const ScalarField& f, double x, double y, int order) {
    const ScalarField* fp = &f;
    double outv = 0.0;
    double* op = &outv;
    eval_points(std::span<const ScalarField* const>(&fp, 1),
                std::span<const double>(&x, 1), std::span<const double>(&y, 1),
                order, std::span<double* const>(&op, 1));
    return outv;
}

double eval_at_fourier(const ScalarField& f, double x, double y) {
    const SpectralCoeffs c = forward(f);
    const int n = f.grid.n;
    std::complex<double> acc = 0.0;
    for (int jy = 0; jy < n; ++jy) {
        const double xi2 = f.grid.xi(jy);
        for (int jx = 0; jx < n; ++jx) {
            const double xi1 = f.grid.xi(jx);
            // real-part convention for the self-conjugate Nyquist modes
            acc += c.at(jx, jy) * std::exp(std::complex<double>(0.0, xi1 * x + xi2 * y));
        }
    }
    return acc.real();
}

} // namespace bsq
