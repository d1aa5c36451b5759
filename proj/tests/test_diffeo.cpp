#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bsq/diffeo.hpp"
#include "bsq/errors.hpp"
#include "bsq/field_ops.hpp"
#include "bsq/interp.hpp"
#include "oracles.hpp"

using namespace bsq;
constexpr double pi = std::numbers::pi;

namespace {

Diffeo smooth_map(const Grid2D& g, double amp, unsigned seed) {
    VectorField2 d = oracle::random_divfree(g, 3, seed, amp);
    return Diffeo(d);
}

} // namespace

TEST_CASE("translation inverts in one fixed-point iteration") {
    Grid2D g{32, 2.0 * pi};
    VectorField2 d(g);
    for (double& x : d.x1.v) x = 0.7;
    for (double& x : d.x2.v) x = -0.3;
    int iters = 0;
    Diffeo inv = invert(Diffeo(d), 1e-10, 100, nullptr, &iters);
    CHECK(iters == 1);
    CHECK(std::abs(inv.displacement().x1.v[5] + 0.7) <= 1e-14);
    CHECK(std::abs(inv.displacement().x2.v[5] - 0.3) <= 1e-14);
}

TEST_CASE("inverse satisfies the defining fixed point") {
    Grid2D g{64, 2.0 * pi};
    Diffeo phi = smooth_map(g, 0.08, 17u);
    phi.validate();
    Diffeo psi = invert(phi);
    // residual of e = -d(id + e), measured with the same cubic evaluation
    // that the iteration used
    const VectorField2& e = psi.displacement();
    const VectorField2& d = phi.displacement();
    double worst = 0.0;
    for (int iy = 0; iy < g.n; iy += 2)
        for (int ix = 0; ix < g.n; ix += 2) {
            const double px = g.x(ix) + e.x1.at(ix, iy);
            const double py = g.x(iy) + e.x2.at(ix, iy);
            worst = std::max(worst, std::abs(e.x1.at(ix, iy) + eval_at(d.x1, px, py, 3)));
            worst = std::max(worst, std::abs(e.x2.at(ix, iy) + eval_at(d.x2, px, py, 3)));
        }
    CHECK(worst <= 2e-9);
}

TEST_CASE("warm start reuses the previous inverse") {
    Grid2D g{64, 2.0 * pi};
    Diffeo phi = smooth_map(g, 0.08, 17u);
    Diffeo psi = invert(phi);
    int iters = 0;
    VectorField2 warm = psi.displacement();
    Diffeo psi2 = invert(phi, 1e-10, 100, &warm, &iters);
    CHECK(iters <= 2);
    CHECK(oracle::max_abs_diff(psi2.displacement(), psi.displacement()) <= 1e-9);
}

TEST_CASE("composition against the trigonometric oracle") {
    Grid2D g{128, 2.0 * pi};
    ScalarField f = field_from(g, [](double x, double y) {
        return std::sin(x) * std::cos(2.0 * y);
    });
    Diffeo phi = smooth_map(g, 0.05, 4u);
    ScalarField coarse = compose(f, phi, {1, 3});
    ScalarField refined = compose(f, phi, {2, 5});
    const VectorField2& d = phi.displacement();
    double worst_c = 0.0, worst_r = 0.0;
    for (int iy = 0; iy < g.n; iy += 5)
        for (int ix = 0; ix < g.n; ix += 5) {
            const double px = g.x(ix) + d.x1.at(ix, iy);
            const double py = g.x(iy) + d.x2.at(ix, iy);
            const double exact = std::sin(px) * std::cos(2.0 * py);
            worst_c = std::max(worst_c, std::abs(coarse.at(ix, iy) - exact));
            worst_r = std::max(worst_r, std::abs(refined.at(ix, iy) - exact));
        }
    CHECK(worst_c <= 8e-6);
    CHECK(worst_r <= 2e-9);
}

TEST_CASE("compose_many agrees with compose") {
    Grid2D g{64, 32.0};
    ScalarField a = oracle::random_band_limited(g, 5, 61u, 1.0);
    ScalarField b = oracle::random_band_limited(g, 5, 62u, 2.0);
    Diffeo phi = smooth_map(g, 0.3, 8u);
    ScalarField oa(g), ob(g);
    const ScalarField* in[2] = {&a, &b};
    ScalarField* out[2] = {&oa, &ob};
    compose_many(std::span<const ScalarField* const>(in, 2), phi, {2, 5},
                 std::span<ScalarField* const>(out, 2));
    CHECK(oracle::max_abs_diff(oa, compose(a, phi, {2, 5})) == 0.0);
    CHECK(oracle::max_abs_diff(ob, compose(b, phi, {2, 5})) == 0.0);
}

TEST_CASE("jacobian quantities on a closed-form shear") {
    Grid2D g{64, 2.0 * pi};
    const double a = 0.4;
    VectorField2 d(g);
    fill(d.x1, [a](double, double y) { return a * std::sin(y); });
    Diffeo phi(d);
    DiffeoJacobian J = jacobian(phi);
    // grad d has a single nonzero entry d2 d1 = a cos(y)
    CHECK(max_grad_entry(J) == doctest::Approx(a).epsilon(1e-10));
    ScalarField det = jacobian_det(J);
    CHECK(det.max_abs() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(phi.min_jacobian_det() == doctest::Approx(1.0).epsilon(1e-10));
    // largest singular value of [[1, c], [0, 1]] at c = a
    const double expect = 0.5 * (a + std::sqrt(a * a + 4.0));
    CHECK(max_operator_norm(J) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("identity map has unit jacobian") {
    Grid2D g{32, 32.0};
    Diffeo id = Diffeo::identity(g);
    CHECK(id.min_jacobian_det() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_operator_norm(jacobian(id)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("folding maps are rejected") {
    Grid2D g{64, 2.0 * pi};
    VectorField2 d(g);
    fill(d.x1, [](double x, double) { return 1.2 * std::sin(x); });
    Diffeo bad(d);
    CHECK(bad.min_jacobian_det() < 0.0);
    CHECK_THROWS_AS(bad.validate(), DegenerateDiffeo);
    ScalarField f = oracle::random_band_limited(g, 4, 3u, 1.0);
    CHECK_THROWS_AS(compose(f, bad), DegenerateDiffeo);
}

TEST_CASE("inversion failure raises NoConvergence") {
    Grid2D g{64, 2.0 * pi};
    // displacement gradient close to 1: the fixed-point map is barely
    // contractive, so a tiny iteration cap must fail
    VectorField2 d(g);
    fill(d.x1, [](double x, double) { return 0.95 * std::sin(x); });
    CHECK_THROWS_AS(invert(Diffeo(d), 1e-12, 3), NoConvergence);
}
