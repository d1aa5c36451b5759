#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsq/field_ops.hpp"
#include "bsq/spectral.hpp"
#include "oracles.hpp"

using namespace bsq;
using doctest::Approx;

namespace {
const double PI = std::numbers::pi;

Grid2D small() { return Grid2D(8, 2.0 * PI); }
Grid2D desk() { return Grid2D(64, 2.0 * PI); }
} // namespace

TEST_CASE("forward of a constant is the mean mode") {
    auto g = small();
    auto f = field_from(g, [](double, double) { return 3.25; });
    auto c = forward(f);
    CHECK(c.at(0, 0).real() == Approx(3.25).epsilon(1e-14));
    CHECK(c.at(0, 0).imag() == Approx(0.0).epsilon(1e-14));
    double off = 0.0;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx)
            if (jx || jy) off = std::max(off, std::abs(c.at(jx, jy)));
    CHECK(off < 1e-14);
}

TEST_CASE("forward matches the direct DFT oracle") {
    auto g = small();
    auto f = oracle::random_band_limited(g, 3, 42);
    auto c = forward(f);
    auto ref = oracle::naive_forward(f);
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx)
            CHECK(std::abs(c.at(jx, jy) - ref.at(jx, jy)) < 1e-13);
}

TEST_CASE("inverse matches the direct oracle and round-trips") {
    auto g = small();
    auto f = oracle::random_band_limited(g, 3, 7);
    auto c = forward(f);
    CHECK(oracle::max_abs_diff(inverse(c), oracle::naive_inverse(c)) < 1e-13);
    CHECK(oracle::max_abs_diff(inverse(c), f) < 1e-13);
}

TEST_CASE("round-trip on white noise at working resolution") {
    Grid2D g(256, 32.0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ScalarField f(g);
    for (auto& x : f.v) x = uni(rng);
    CHECK(oracle::max_abs_diff(inverse(forward(f)), f) < 1e-12);
}

TEST_CASE("sin(x1) has coefficients -i/2 and +i/2 at k = (1,0), (-1,0)") {
    auto g = desk();
    auto f = field_from(g, [](double x, double) { return std::sin(x); });
    auto c = forward(f);
    CHECK(std::abs(c.at(1, 0) - std::complex<double>(0.0, -0.5)) < 1e-14);
    CHECK(std::abs(c.at(g.n - 1, 0) - std::complex<double>(0.0, 0.5)) < 1e-14);
}

TEST_CASE("spectral derivative is exact on band-limited data") {
    auto g = desk();
    auto f = field_from(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y); });
    auto d1 = derivative(f, 1);
    auto d2 = derivative(f, 2);
    auto d1_ref =
        field_from(g, [](double x, double y) { return std::cos(x) * std::cos(2 * y); });
    auto d2_ref =
        field_from(g, [](double x, double y) { return -2.0 * std::sin(x) * std::sin(2 * y); });
    CHECK(oracle::max_abs_diff(d1, d1_ref) < 1e-12);
    CHECK(oracle::max_abs_diff(d2, d2_ref) < 1e-12);
}

TEST_CASE("inverse laplacian: sin(x1) -> -sin(x1), zero mode dropped") {
    auto g = desk();
    auto f = field_from(g, [](double x, double) { return std::sin(x) + 0.7; });
    auto out = inverse_laplacian(f);
    auto ref = field_from(g, [](double x, double) { return -std::sin(x); });
    CHECK(oracle::max_abs_diff(out, ref) < 1e-13);
}

TEST_CASE("riesz transform: R1 sin(x1) = cos(x1)") {
    auto g = desk();
    auto f = field_from(g, [](double x, double) { return std::sin(x); });
    auto ref = field_from(g, [](double x, double) { return std::cos(x); });
    CHECK(oracle::max_abs_diff(riesz(f, 1), ref) < 1e-13);
}

TEST_CASE("riesz identity R1^2 + R2^2 = -Id on mean-zero fields") {
    auto g = desk();
    auto f = oracle::random_band_limited(g, 10, 5);
    // remove the mean so -Id is exact
    auto c = forward(f);
    c.at(0, 0) = 0.0;
    f = inverse(c);
    auto r = riesz(riesz(f, 1), 1) + riesz(riesz(f, 2), 2);
    ScalarField neg = f;
    neg *= -1.0;
    CHECK(oracle::max_abs_diff(r, neg) < 1e-12);
}

TEST_CASE("ball cutoff keeps |xi| = 1 and kills |xi| = 2; the split is a partition") {
    auto g = desk();
    auto f1 = field_from(g, [](double x, double) { return std::sin(x); });
    auto f2 = field_from(g, [](double x, double) { return std::sin(2 * x); });

    auto inside = [&](const ScalarField& f) {
        auto c = forward(f);
        apply_multiplier(c, symbol_ball_cutoff);
        return inverse(c);
    };
    CHECK(oracle::max_abs_diff(inside(f1), f1) < 1e-13); // boundary mode retained
    CHECK(inside(f2).max_abs() < 1e-13);                 // outside mode removed

    auto f = oracle::random_band_limited(g, 12, 3);
    auto c = forward(f);
    auto clo = c, chi = c;
    apply_multiplier(clo, symbol_ball_cutoff);
    apply_multiplier(chi, [](double x1, double x2) {
        return 1.0 - symbol_ball_cutoff(x1, x2);
    });
    // exact partition: the two complements sum to the original, mode by mode
    for (std::size_t i = 0; i < c.c.size(); ++i)
        CHECK(clo.c[i] + chi.c[i] == c.c[i]);
}

TEST_CASE("multiplier composition equals the combined symbol") {
    auto g = desk();
    auto f = oracle::random_band_limited(g, 9, 11);
    auto a = forward(f);
    apply_multiplier(a, [](double x1, double x2) { return symbol_gradient(1, x1, x2); });
    apply_multiplier(a, symbol_inverse_laplacian);
    auto b = forward(f);
    apply_multiplier(b, [](double x1, double x2) {
        return symbol_gradient(1, x1, x2) * symbol_inverse_laplacian(x1, x2);
    });
    // identical up to one floating-point reassociation per mode
    for (std::size_t i = 0; i < a.c.size(); ++i)
        CHECK(std::abs(a.c[i] - b.c[i]) <= 1e-15 * (1.0 + std::abs(b.c[i])));
}

TEST_CASE("sobolev norm closed forms on sin(x1)") {
    auto g = desk();
    auto f = field_from(g, [](double x, double) { return std::sin(x); });
    const double l2 = std::sqrt(2.0 * PI * PI);
    CHECK(sobolev_norm(f, 0.0) == Approx(l2).epsilon(1e-13));
    for (double s : {0.5, 1.0, 2.0, 3.0})
        CHECK(sobolev_norm(f, s) == Approx(std::pow(2.0, 0.5 * s) * l2).epsilon(1e-13));
    // Parseval: s = 0 equals the grid L2 norm
    auto r = oracle::random_band_limited(g, 14, 8);
    CHECK(sobolev_norm(r, 0.0) == Approx(l2_norm(r)).epsilon(1e-13));
}

TEST_CASE("pair norm is the max of component norms") {
    auto g = desk();
    VectorField2 u(field_from(g, [](double x, double) { return std::sin(x); }),
                   ScalarField(g));
    auto th = field_from(g, [](double x, double y) { return 2.0 * std::sin(x + y); });
    CHECK(pair_norm(u, th, 1.0) == Approx(sobolev_norm(th, 1.0)).epsilon(1e-13));
    CHECK(sobolev_norm(u, 1.0) == Approx(sobolev_norm(u.x1, 1.0)).epsilon(1e-13));
}

TEST_CASE("dealias zeroes exactly the modes past n/3") {
    Grid2D g(8, 2.0 * PI);
    // n = 8: keep |k| <= 2, zero |k| = 3 and the Nyquist k = -4
    auto f = field_from(g, [](double x, double y) {
        return std::sin(2 * x) + std::sin(3 * x) + std::cos(3 * y);
    });
    auto d = dealias(f);
    auto ref = field_from(g, [](double x, double) { return std::sin(2 * x); });
    CHECK(oracle::max_abs_diff(d, ref) < 1e-13);
}

TEST_CASE("dealiased products match the exact truncated convolution") {
    Grid2D g(8, 2.0 * PI);
    auto a = oracle::random_band_limited(g, 2, 21);
    auto b = oracle::random_band_limited(g, 2, 22);
    ScalarField prod(g);
    for (std::size_t i = 0; i < prod.v.size(); ++i) prod.v[i] = a.v[i] * b.v[i];
    auto cp = forward(prod);
    dealias(cp);
    auto conv = oracle::naive_convolution(forward(a), forward(b));
    // inputs are band-limited to n/3, so retained modes carry no aliasing
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            if (!mode_in_dealias_band(g, jx, jy)) continue;
            CHECK(std::abs(cp.at(jx, jy) - conv.at(jx, jy)) < 1e-13);
        }
}

TEST_CASE("upsample reproduces coarse nodes and analytic modes") {
    Grid2D g(16, 2.0 * PI);
    auto f = field_from(g, [](double x, double y) { return std::sin(3 * x) * std::cos(y); });
    auto fine = upsample(f, 4);
    CHECK(fine.grid.n == 64);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            CHECK(fine.at(4 * ix, 4 * iy) == Approx(f.at(ix, iy)).epsilon(1e-12));
    auto ref = field_from(fine.grid,
                          [](double x, double y) { return std::sin(3 * x) * std::cos(y); });
    CHECK(oracle::max_abs_diff(fine, ref) < 1e-12);
}
