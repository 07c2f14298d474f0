#include "harnacklab/drift.hpp"

#include <cmath>
#include <stdexcept>

#include "harnacklab/spectral.hpp"

namespace harnack {

namespace {

const Grid& grid_of(const ManifoldModel& model) {
    if (!model.is_grid_model())
        throw std::invalid_argument("drift: model has no grid support");
    return model.grid();
}

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

DriftSpec make_drift(const ManifoldModel& model, const VectorGridField& x,
                     const ScalarGridField& u) {
    const Grid& g = grid_of(model);
    if (!(x.grid == g) || !(u.grid == g))
        throw std::invalid_argument("drift: X and U must live on the model grid");
    if (!finite_all(x.v) || !finite_all(u.v))
        throw std::invalid_argument("drift: X and U must be finite");
    return DriftSpec{model, x, u};
}

DerivedFields derive(const DriftSpec& spec) {
    const Grid& g = grid_of(spec.model);
    const int d = g.dim();
    DerivedFields f;
    f.gradx = covariant_grad_vector(spec.model, spec.x);
    f.a = MatrixGridField(g);
    f.symx = MatrixGridField(g);
    for (std::size_t n = 0; n < g.node_count(); ++n)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                f.a.at(n, i, j) = f.gradx.at(n, i, j) - f.gradx.at(n, j, i);
                f.symx.at(n, i, j) = f.gradx.at(n, i, j) + f.gradx.at(n, j, i);
            }
    f.divx = covariant_divergence(spec.model, spec.x);
    f.w = ScalarGridField(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double x2 = 0.0;
        for (int c = 0; c < d; ++c) x2 += spec.x.at(n, c) * spec.x.at(n, c);
        f.w.v[n] = f.divx.v[n] + 0.5 * x2 - 2.0 * spec.u.v[n];
    }
    f.gradw = covariant_gradient(spec.model, f.w);
    f.hessw = covariant_hessian(spec.model, f.w);
    f.lapw = covariant_laplacian(spec.model, f.w);
    f.grada = covariant_grad_matrix(spec.model, f.a);
    f.diva = VectorGridField(g);
    for (std::size_t n = 0; n < g.node_count(); ++n)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += f.grada.at(n, i, i, j);
            f.diva.at(n, j) = s;
        }
    f.norma2 = ScalarGridField(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += f.a.at(n, i, j) * f.a.at(n, i, j);
        f.norma2.v[n] = s;
    }
    return f;
}

double w_precision_check(const DriftSpec& spec) {
    const Grid& g = grid_of(spec.model);
    const int d = g.dim();
    const DerivedFields f = derive(spec);
    // recompute div X through the full-spectrum multiplier path instead of
    // the per-line transforms used by covariant_divergence
    ScalarGridField div2(g);
    for (int a = 0; a < d; ++a) {
        auto spec_a = spectral::forward(component(spec.x, a));
        spectral::apply_derivative(spec_a, g, a, 1);
        const ScalarGridField da = spectral::to_real_field(spec_a, g);
        for (std::size_t n = 0; n < g.node_count(); ++n) div2.v[n] += da.v[n];
    }
    if (const auto* ct = spec.model.conformal()) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            double corr = 0.0;
            for (int a = 0; a < d; ++a) corr += ct->dphi.at(n, a) * spec.x.at(n, a);
            div2.v[n] = std::exp(-ct->phi.v[n]) * (div2.v[n] + corr);
        }
    }
    double worst = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double x2 = 0.0;
        for (int c = 0; c < d; ++c) x2 += spec.x.at(n, c) * spec.x.at(n, c);
        const double w2 = div2.v[n] + 0.5 * x2 - 2.0 * spec.u.v[n];
        worst = std::max(worst, std::abs(f.w.v[n] - w2));
    }
    return worst;
}

}  // namespace harnack
