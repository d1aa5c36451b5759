#include "bsq/diffeo.hpp"

#include <cmath>

#include "bsq/errors.hpp"
#include "bsq/interp.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

DiffeoJacobian jacobian(const Diffeo& phi) {
    const auto& d = phi.displacement();
    return {derivative(d.x1, 1), derivative(d.x1, 2),
            derivative(d.x2, 1), derivative(d.x2, 2)};
}

ScalarField jacobian_det(const DiffeoJacobian& J) {
    ScalarField det(J.d1d1.grid);
    for (std::size_t i = 0; i < det.v.size(); ++i) {
        const double a = 1.0 + J.d1d1.v[i], b = J.d2d1.v[i];
        const double c = J.d1d2.v[i], d = 1.0 + J.d2d2.v[i];
        det.v[i] = a * d - b * c;
    }
    return det;
}

double max_operator_norm(const DiffeoJacobian& J) {
    // spectral norm of the 2x2 matrix I + grad d at each node
    double m = 0.0;
    for (std::size_t i = 0; i < J.d1d1.v.size(); ++i) {
        const double a = 1.0 + J.d1d1.v[i], b = J.d2d1.v[i];
        const double c = J.d1d2.v[i], d = 1.0 + J.d2d2.v[i];
        const double q = a * a + b * b + c * c + d * d;
        const double det = a * d - b * c;
        const double disc = std::sqrt(std::max(0.0, q * q - 4.0 * det * det));
        m = std::max(m, 0.5 * (q + disc));
    }
    return std::sqrt(m);
}

double max_grad_entry(const DiffeoJacobian& J) {
    double m = 0.0;
    for (const ScalarField* f : {&J.d1d1, &J.d2d1, &J.d1d2, &J.d2d2})
        m = std::max(m, f->max_abs());
    return m;
}

double Diffeo::min_jacobian_det() const {
    if (!min_det_) {
        const ScalarField det = bsq::jacobian_det(bsq::jacobian(*this));
        double m = det.v[0];
        for (double x : det.v) m = std::min(m, x);
        min_det_ = m;
    }
    return *min_det_;
}

void Diffeo::validate() const {
    if (min_jacobian_det() <= 0.0)
        throw DegenerateDiffeo("det(I + grad d) <= 0 (min = " +
                               std::to_string(*min_det_) + ")");
}

namespace {

// Target points x + d(x) for every node, in physical coordinates.
void target_points(const VectorField2& d, RealVec& px, RealVec& py) {
    const Grid2D& g = d.grid();
    const int n = g.n;
    px.resize(g.size());
    py.resize(g.size());
    for (int iy = 0; iy < n; ++iy) {
        const double y = g.x(iy);
        const std::size_t row = static_cast<std::size_t>(iy) * n;
        for (int ix = 0; ix < n; ++ix) {
            px[row + ix] = g.x(ix) + d.x1.v[row + ix];
            py[row + ix] = y + d.x2.v[row + ix];
        }
    }
}

} // namespace

void compose_many(std::span<const ScalarField* const> fields, const Diffeo& phi,
                  const CompositionScheme& cs, std::span<ScalarField* const> out) {
    if (fields.empty()) return;
    RealVec px, py;
    target_points(phi.displacement(), px, py);

    std::vector<ScalarField> padded;
    std::vector<const ScalarField*> srcs(fields.begin(), fields.end());
    if (cs.upsample > 1) {
        padded.reserve(fields.size());
        for (const ScalarField* f : fields) padded.push_back(upsample(*f, cs.upsample));
        for (std::size_t i = 0; i < padded.size(); ++i) srcs[i] = &padded[i];
    }
    std::vector<double*> outp(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i]->grid = phi.grid();
        out[i]->v.resize(phi.grid().size());
        outp[i] = out[i]->v.data();
    }
    eval_points(srcs, px, py, cs.order, outp);
}

ScalarField compose(const ScalarField& f, const Diffeo& phi,
                    const CompositionScheme& cs, bool check) {
    if (check) phi.validate();
    ScalarField out;
    const ScalarField* in = &f;
    ScalarField* op = &out;
    compose_many(std::span<const ScalarField* const>(&in, 1), phi, cs,
                 std::span<ScalarField* const>(&op, 1));
    return out;
}

VectorField2 compose(const VectorField2& f, const Diffeo& phi,
                     const CompositionScheme& cs, bool check) {
    if (check) phi.validate();
    VectorField2 out(phi.grid());
    const ScalarField* in[2] = {&f.x1, &f.x2};
    ScalarField* op[2] = {&out.x1, &out.x2};
    compose_many(std::span<const ScalarField* const>(in, 2), phi, cs,
                 std::span<ScalarField* const>(op, 2));
    return out;
}

Diffeo invert(const Diffeo& phi, double tol, int max_iter,
              const VectorField2* warm, int* iterations) {
    const Grid2D& g = phi.grid();
    const VectorField2& d = phi.displacement();

    // e_0 = -d (exact node values; a translation converges immediately)
    VectorField2 e(g);
    if (warm && warm->grid() == g) {
        e = *warm;
    } else {
        e = d;
        e *= -1.0;
    }

    RealVec px(g.size()), py(g.size());
    ScalarField d1(g), d2(g);
    const ScalarField* src[2] = {&d.x1, &d.x2};
    double* outp[2] = {d1.v.data(), d2.v.data()};
    const int n = g.n;

    for (int it = 1; it <= max_iter; ++it) {
        for (int iy = 0; iy < n; ++iy) {
            const double y = g.x(iy);
            const std::size_t row = static_cast<std::size_t>(iy) * n;
            for (int ix = 0; ix < n; ++ix) {
                px[row + ix] = g.x(ix) + e.x1.v[row + ix];
                py[row + ix] = y + e.x2.v[row + ix];
            }
        }
        eval_points(std::span<const ScalarField* const>(src, 2), px, py, 3,
                    std::span<double* const>(outp, 2));
        double inc = 0.0;
        for (std::size_t i = 0; i < e.x1.v.size(); ++i) {
            const double n1 = -d1.v[i], n2 = -d2.v[i];
            inc = std::max(inc, std::max(std::abs(n1 - e.x1.v[i]),
                                         std::abs(n2 - e.x2.v[i])));
            e.x1.v[i] = n1;
            e.x2.v[i] = n2;
        }
        if (inc <= tol) {
            if (iterations) *iterations = it;
            return Diffeo(std::move(e));
        }
    }
    throw NoConvergence("diffeo inversion: no convergence in " +
                        std::to_string(max_iter) + " iterations");
}

} // namespace bsq
