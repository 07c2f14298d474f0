#include "harnacklab/logfield.hpp"

#include <cmath>
#include <stdexcept>

#include "harnacklab/covariant.hpp"

namespace harnack {

namespace {

// index of the node shifted by s steps along axis a, periodic
std::size_t shifted(const Grid& g, std::size_t node, int a, int s) {
    auto idx = g.unflatten(node);
    const int m = g.points(a);
    idx[a] = ((idx[a] + s) % m + m) % m;
    return g.flatten(idx[0], idx[1], idx[2]);
}

void stencil_derivatives(LogDerivatives& out) {
    const Grid& g = out.logrho.grid;
    const ScalarGridField& f = out.logrho;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        double trace = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double h = g.spacing(a);
            const double fp = f.v[shifted(g, node, a, +1)];
            const double fm = f.v[shifted(g, node, a, -1)];
            out.grad.at(node, a) = (fp - fm) / (2.0 * h);
            const double second = (fp - 2.0 * f.v[node] + fm) / (h * h);
            out.hess.at(node, a, a) = second;
            trace += second;
            for (int b = a + 1; b < g.dim(); ++b) {
                const double hb = g.spacing(b);
                const double fpp = f.v[shifted(g, shifted(g, node, a, +1), b, +1)];
                const double fpm = f.v[shifted(g, shifted(g, node, a, +1), b, -1)];
                const double fmp = f.v[shifted(g, shifted(g, node, a, -1), b, +1)];
                const double fmm = f.v[shifted(g, shifted(g, node, a, -1), b, -1)];
                const double mixed = (fpp - fpm - fmp + fmm) / (4.0 * h * hb);
                out.hess.at(node, a, b) = mixed;
                out.hess.at(node, b, a) = mixed;
            }
        }
        out.lap.v[node] = trace;
    }
}

}  // namespace

LogDerivatives log_derivatives(const ManifoldModel& model, const ScalarGridField& rho,
                               LogRoute route) {
    if (!model.is_grid_model()) throw std::invalid_argument("log_derivatives: model has no grid");
    if (!(rho.grid == model.grid()))
        throw std::invalid_argument("log_derivatives: field grid does not match the model");
    if (!rho.all_finite()) throw std::invalid_argument("log_derivatives: field is not finite");
    const double hi = rho.max();
    if (rho.min() <= 0.0 || hi <= 0.0)
        throw std::invalid_argument("log_derivatives: field is not strictly positive");

    if (route == LogRoute::automatic)
        route = rho.min() / hi < 1e-6 ? LogRoute::stencil : LogRoute::spectral;
    if (route == LogRoute::stencil && model.flat() == nullptr)
        throw std::invalid_argument("log_derivatives: stencil route needs a flat model");

    LogDerivatives out;
    out.logrho = ScalarGridField(rho.grid);
    for (std::size_t n = 0; n < rho.v.size(); ++n) out.logrho.v[n] = std::log(rho.v[n]);

    if (route == LogRoute::stencil) {
        out.grad = VectorGridField(rho.grid);
        out.hess = MatrixGridField(rho.grid);
        out.lap = ScalarGridField(rho.grid);
        stencil_derivatives(out);
        out.used_stencils = true;
    } else {
        out.grad = covariant_gradient(model, out.logrho);
        out.hess = covariant_hessian(model, out.logrho);
        out.lap = ScalarGridField(rho.grid);
        for (std::size_t n = 0; n < rho.v.size(); ++n) {
            double tr = 0.0;
            for (int a = 0; a < rho.grid.dim(); ++a) tr += out.hess.at(n, a, a);
            out.lap.v[n] = tr;
        }
    }

    out.trust.assign(rho.v.size(), 1);
    std::size_t kept = 0;
    for (std::size_t n = 0; n < rho.v.size(); ++n) {
        out.trust[n] = rho.v[n] >= 1e-8 * hi ? 1 : 0;
        kept += out.trust[n];
    }
    out.coverage = static_cast<double>(kept) / static_cast<double>(rho.v.size());
    return out;
}

}  // namespace harnack
