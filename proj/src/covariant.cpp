#include "harnacklab/covariant.hpp"

#include <cmath>
#include <stdexcept>

#include "harnacklab/spectral.hpp"

namespace harnack {

namespace {

const Grid& grid_or_throw(const ManifoldModel& model) {
    if (!model.is_grid_model())
        throw std::invalid_argument("covariant operator: sphere has no grid support");
    return model.grid();
}

ScalarGridField mixed_partial(const ScalarGridField& f, int a, int b) {
    if (a == b) return spectral::derivative(f, a, 2);
    return spectral::derivative(spectral::derivative(f, a, 1), b, 1);
}

}  // namespace

VectorGridField covariant_gradient(const ManifoldModel& model, const ScalarGridField& f) {
    const Grid& g = grid_or_throw(model);
    const int d = g.dim();
    VectorGridField out(g);
    for (int a = 0; a < d; ++a) set_component(out, a, spectral::derivative(f, a, 1));
    if (const auto* ct = model.conformal()) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const double scale = std::exp(-ct->phi.v[n]);
            for (int a = 0; a < d; ++a) out.at(n, a) *= scale;
        }
    }
    return out;
}

MatrixGridField covariant_hessian(const ManifoldModel& model, const ScalarGridField& f) {
    const Grid& g = grid_or_throw(model);
    const int d = g.dim();
    MatrixGridField out(g);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            const ScalarGridField dab = mixed_partial(f, a, b);
            set_component(out, a, b, dab);
            if (a != b) set_component(out, b, a, dab);
        }
    if (const auto* ct = model.conformal()) {
        std::array<ScalarGridField, 2> df{spectral::derivative(f, 0, 1),
                                          spectral::derivative(f, 1, 1)};
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const double e2 = std::exp(-2.0 * ct->phi.v[n]);
            const double p0 = ct->dphi.at(n, 0), p1 = ct->dphi.at(n, 1);
            const double grad_dot = p0 * df[0].v[n] + p1 * df[1].v[n];
            const double dphi[2] = {p0, p1};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double h = out.at(n, a, b) - dphi[a] * df[b].v[n] - dphi[b] * df[a].v[n];
                    if (a == b) h += grad_dot;
                    out.at(n, a, b) = e2 * h;
                }
        }
    }
    // enforce exact symmetry; the raw asymmetry is discretization noise
    for (std::size_t n = 0; n < g.node_count(); ++n)
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                const double s = 0.5 * (out.at(n, a, b) + out.at(n, b, a));
                out.at(n, a, b) = out.at(n, b, a) = s;
            }
    return out;
}

ScalarGridField covariant_laplacian(const ManifoldModel& model, const ScalarGridField& f) {
    const Grid& g = grid_or_throw(model);
    if (model.flat()) {
        ScalarGridField out(g);
        for (int a = 0; a < g.dim(); ++a) {
            const ScalarGridField daa = spectral::derivative(f, a, 2);
            for (std::size_t n = 0; n < g.node_count(); ++n) out.v[n] += daa.v[n];
        }
        return out;
    }
    const MatrixGridField h = covariant_hessian(model, f);
    ScalarGridField out(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double tr = 0.0;
        for (int a = 0; a < g.dim(); ++a) tr += h.at(n, a, a);
        out.v[n] = tr;
    }
    return out;
}

MatrixGridField covariant_grad_vector(const ManifoldModel& model, const VectorGridField& x) {
    const Grid& g = grid_or_throw(model);
    const int d = g.dim();
    MatrixGridField out(g);
    for (int b = 0; b < d; ++b) {
        const ScalarGridField comp = component(x, b);
        for (int a = 0; a < d; ++a) {
            const ScalarGridField dab = spectral::derivative(comp, a, 1);
            for (std::size_t n = 0; n < g.node_count(); ++n) out.at(n, a, b) = dab.v[n];
        }
    }
    if (const auto* ct = model.conformal()) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const double ephi = std::exp(-ct->phi.v[n]);
            const double p[2] = {ct->dphi.at(n, 0), ct->dphi.at(n, 1)};
            const double xdotp = x.at(n, 0) * p[0] + x.at(n, 1) * p[1];
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double val = out.at(n, a, b) - x.at(n, a) * p[b];
                    if (a == b) val += xdotp;
                    out.at(n, a, b) = ephi * val;
                }
        }
    }
    return out;
}

Tensor3GridField covariant_grad_matrix(const ManifoldModel& model, const MatrixGridField& mat) {
    const Grid& g = grid_or_throw(model);
    const int d = g.dim();
    Tensor3GridField out(g);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const ScalarGridField comp = component(mat, i, j);
            for (int m = 0; m < d; ++m) {
                const ScalarGridField dm = spectral::derivative(comp, m, 1);
                for (std::size_t n = 0; n < g.node_count(); ++n) out.at(n, m, i, j) = dm.v[n];
            }
        }
    if (const auto* ct = model.conformal()) {
        // tensor rule with omega_m(b,c) = e^{-phi}(delta_mc phi_b - delta_mb phi_c)
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const double ephi = std::exp(-ct->phi.v[n]);
            const double p[2] = {ct->dphi.at(n, 0), ct->dphi.at(n, 1)};
            double mm[2][2];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) mm[i][j] = mat.at(n, i, j);
            for (int m = 0; m < 2; ++m)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double val = out.at(n, m, i, j) - p[i] * mm[m][j] - p[j] * mm[i][m];
                        if (m == i)
                            for (int c = 0; c < 2; ++c) val += p[c] * mm[c][j];
                        if (m == j)
                            for (int c = 0; c < 2; ++c) val += p[c] * mm[i][c];
                        out.at(n, m, i, j) = ephi * val;
                    }
        }
    }
    return out;
}

ScalarGridField covariant_divergence(const ManifoldModel& model, const VectorGridField& x) {
    const Grid& g = grid_or_throw(model);
    ScalarGridField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const ScalarGridField da = spectral::derivative(component(x, a), a, 1);
        for (std::size_t n = 0; n < g.node_count(); ++n) out.v[n] += da.v[n];
    }
    if (const auto* ct = model.conformal()) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            double corr = 0.0;
            for (int a = 0; a < 2; ++a) corr += ct->dphi.at(n, a) * x.at(n, a);
            out.v[n] = std::exp(-ct->phi.v[n]) * (out.v[n] + corr);
        }
    }
    return out;
}

}  // namespace harnack
