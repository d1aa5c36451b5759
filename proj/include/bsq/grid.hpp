#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "bsq/errors.hpp"

namespace bsq {

/// Uniform periodic grid on [0, box_length)^2 with n points per axis.
///
/// Index convention: row-major, x1 fastest (idx = iy * n + ix).
/// Wavenumber convention: integer index k in [-n/2, n/2), physical
/// frequency xi = 2*pi*k / box_length.  The Nyquist row k = -n/2 carries
/// no usable phase information for odd (derivative-like) symbols and is
/// zeroed by those.
struct Grid2D {
    int n = 0;
    double box_length = 0.0;

    Grid2D() = default;
    Grid2D(int n_, double box_length_) : n(n_), box_length(box_length_) {
        if (n < 8 || n % 2 != 0)
            throw ConfigError("Grid2D: n must be even and >= 8");
        if (!(box_length > 0.0))
            throw ConfigError("Grid2D: box_length must be positive");
    }

    bool operator==(const Grid2D&) const = default;

    double h() const { return box_length / n; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }

    double x(int i) const { return box_length * i / n; }

    /// Integer wavenumber for storage index j along one axis.
    int wavenumber(int j) const { return j <= n / 2 - 1 ? j : j - n; }

    /// Physical frequency for storage index j along one axis.
    double xi(int j) const {
        return 2.0 * std::numbers::pi * wavenumber(j) / box_length;
    }

    /// Shortest signed periodic displacement a - b on one axis.
    double periodic_delta(double a, double b) const {
        double d = std::remainder(a - b, box_length);
        return d;
    }

    double periodic_distance(double ax, double ay, double bx, double by) const {
        double dx = periodic_delta(ax, bx);
        double dy = periodic_delta(ay, by);
        return std::sqrt(dx * dx + dy * dy);
    }
};

} // namespace bsq
