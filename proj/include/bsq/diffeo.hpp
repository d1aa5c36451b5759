#pragma once

#include <optional>
#include <span>

#include "bsq/field.hpp"

namespace bsq {

/// How compositions f(phi(x)) are evaluated.  `upsample` > 1 first pads the
/// field spectrally onto a finer grid, which keeps the interpolation error
/// negligible for fields with content near the original grid scale.
struct CompositionScheme {
    int upsample = 1;
    int order = 3;
};

/// Near-identity diffeomorphism of the torus, stored as the displacement
/// d = phi - id on grid nodes.  Invariant: det(I + grad d) > 0 everywhere
/// (checked by validate(), cached).
class Diffeo {
public:
    Diffeo() = default;
    explicit Diffeo(VectorField2 displacement) : d_(std::move(displacement)) {}

    static Diffeo identity(const Grid2D& g) { return Diffeo(VectorField2(g)); }

    const VectorField2& displacement() const { return d_; }
    const Grid2D& grid() const { return d_.grid(); }

    /// Throws DegenerateDiffeo if det(I + grad d) <= 0 anywhere.
    void validate() const;
    double min_jacobian_det() const;

private:
    VectorField2 d_;
    mutable std::optional<double> min_det_;
};

/// Entries of grad d (spectral derivatives).
struct DiffeoJacobian {
    ScalarField d1d1, d2d1, d1d2, d2d2; // d_j d_i naming: d<axis>d<component>
};

DiffeoJacobian jacobian(const Diffeo& phi);
ScalarField jacobian_det(const DiffeoJacobian& J);
/// max over nodes of the operator (spectral) norm of I + grad d.
double max_operator_norm(const DiffeoJacobian& J);
/// max over nodes of max_ij |(grad d)_ij|.
double max_grad_entry(const DiffeoJacobian& J);

/// Returns f(phi(x)) sampled on grid nodes.
ScalarField compose(const ScalarField& f, const Diffeo& phi,
                    const CompositionScheme& cs = {}, bool check = true);
VectorField2 compose(const VectorField2& f, const Diffeo& phi,
                     const CompositionScheme& cs = {}, bool check = true);

/// Compose several scalar fields with the same map in one pass (points and
/// stencils shared).  `fields` may mix different source fields.
void compose_many(std::span<const ScalarField* const> fields, const Diffeo& phi,
                  const CompositionScheme& cs, std::span<ScalarField* const> out);

/// Fixed-point inversion of phi = id + d: solve e = -d(id + e).
/// `warm` seeds the iteration (e.g. the previous time step's inverse).
/// Throws NoConvergence if the sup-norm increment stays above tol.
Diffeo invert(const Diffeo& phi, double tol = 1e-10, int max_iter = 100,
              const VectorField2* warm = nullptr, int* iterations = nullptr);

} // namespace bsq
