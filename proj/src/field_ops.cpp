#include "bsq/field_ops.hpp"

#include <cmath>
#include <numbers>

#include "bsq/errors.hpp"

namespace bsq {

ScalarField divergence(const VectorField2& u) {
    ScalarField d = derivative(u.x1, 1);
    d += derivative(u.x2, 2);
    return d;
}

ScalarField curl(const VectorField2& u) {
    ScalarField w = derivative(u.x2, 1);
    w -= derivative(u.x1, 2);
    return w;
}

VectorField2 velocity_from_stream(const ScalarField& psi) {
    ScalarField u1 = derivative(psi, 2);
    u1 *= -1.0;
    return {std::move(u1), derivative(psi, 1)};
}

ScalarField bump(const Grid2D& g, double cx, double cy, double radius) {
    if (radius < 2.0 * g.h())
        throw UnresolvableBump("bump radius " + std::to_string(radius) +
                               " below two grid cells (h = " + std::to_string(g.h()) + ")");
    ScalarField f(g);
    fill(f, [&](double x, double y) {
        const double r = g.periodic_distance(x, y, cx, cy) / radius;
        if (r >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - r * r));
    });
    return f;
}

ScalarField gaussian(const Grid2D& g, double cx, double cy, double sigma, double amp) {
    ScalarField f(g);
    fill(f, [&](double x, double y) {
        const double r = g.periodic_distance(x, y, cx, cy);
        return amp * std::exp(-0.5 * r * r / (sigma * sigma));
    });
    return f;
}

ScalarField normalize_hs(const ScalarField& f, double s, double target) {
    if (target == 0.0) return ScalarField(f.grid);
    const double norm = sobolev_norm(f, s);
    if (norm < 1e-14)
        throw ZeroField("normalize_hs: field has numerically zero H^s norm");
    ScalarField out = f;
    out *= target / norm;
    return out;
}

VectorField2 normalize_hs(const VectorField2& u, double s, double target) {
    if (target == 0.0) return VectorField2(u.grid());
    const double norm = sobolev_norm(u, s);
    if (norm < 1e-14)
        throw ZeroField("normalize_hs: field has numerically zero H^s norm");
    VectorField2 out = u;
    out *= target / norm;
    return out;
}

InitialData initial_data_preset(const std::string& name, const Grid2D& g) {
    const double kappa = 2.0 * std::numbers::pi / g.box_length;
    auto cellular_stream = [&] {
        return field_from(g, [kappa](double x, double y) {
            return 0.05 * (std::sin(kappa * x) * std::sin(kappa * y) +
                           0.4 * std::cos(2.0 * kappa * x) * std::sin(kappa * y) +
                           0.25 * std::sin(kappa * x) * std::cos(3.0 * kappa * y));
        });
    };
    if (name == "rest") return {VectorField2(g), ScalarField(g)};
    if (name == "taylor_green")
        return {velocity_from_stream(cellular_stream()), ScalarField(g)};
    if (name == "bump_theta")
        return {velocity_from_stream(cellular_stream()),
                gaussian(g, g.box_length / 3.0, 0.5 * g.box_length,
                         0.078 * g.box_length, 0.01)};
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace bsq
