#include "harnacklab/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harnack {

namespace {

Mat node_mat(const MatrixGridField& f, std::size_t node) {
    const int d = f.grid.dim();
    Mat m = Mat::zero(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = f.at(node, i, j);
    return m;
}

void require_kahler(const DerivedFields& f, const Mat& j) {
    if (f.a.grid.dim() != 2 || j.n != 2)
        throw std::invalid_argument("kahler hypothesis check needs a 2-dim model with J");
}

// Ricci eigenvalue lower bound over the grid. Flat tori are Ricci-flat; on the
// conformal torus Rc = (Gauss curvature) g in the frame.
double min_ricci_eigenvalue(const ManifoldModel& model) {
    if (model.flat()) return 0.0;
    if (const auto* ct = model.conformal()) return ct->gauss.min();
    throw std::invalid_argument("hypotheses: model has no grid support");
}

}  // namespace

double best_k(const DerivedFields& f) {
    const Grid& g = f.a.grid;
    double sup = 0.0;
    bool first = true;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Mat a = node_mat(f.a, n);
        const Mat s = 0.25 * matmul(a, a) + node_mat(f.hessw, n);
        const double top = sym_eigs(s).max();
        if (first || top > sup) sup = top;
        first = false;
    }
    return std::sqrt(std::max(0.0, sup));
}

double best_k_kahler(const DerivedFields& f, const Mat& j) {
    require_kahler(f, j);
    const Grid& g = f.a.grid;
    const Mat jt = transpose(j);
    double sup = 0.0;
    bool first = true;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Mat a = node_mat(f.a, n);
        const Mat h = node_mat(f.hessw, n);
        const Mat s = 0.25 * matmul(a, a) + 0.5 * (h + matmul(jt, matmul(h, j)));
        const double top = sym_eigs(s).max();
        if (first || top > sup) sup = top;
        first = false;
    }
    return std::sqrt(std::max(0.0, sup));
}

KahlerAConditions kahler_a_conditions(const DerivedFields& f, const Mat& j) {
    require_kahler(f, j);
    const Grid& g = f.a.grid;
    const Mat jt = transpose(j);
    KahlerAConditions out;
    // unit directions v sampled on the half circle (the expression is even in v)
    constexpr int kDirections = 8;
    std::array<Vec, kDirections> dirs;
    for (int s = 0; s < kDirections; ++s) {
        dirs[s] = vec_zero(2);
        const double th = M_PI * s / kDirections;
        dirs[s][0] = std::cos(th);
        dirs[s][1] = std::sin(th);
    }
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Mat a = node_mat(f.a, n);
        out.sym_residual =
            std::max(out.sym_residual, max_abs(matmul(jt, matmul(a, j)) - a));
        for (const Vec& v : dirs) {
            const Vec jv = matvec(j, v);
            for (int w = 0; w < 2; ++w) {
                double r = 0.0;
                for (int m = 0; m < 2; ++m)
                    for (int i = 0; i < 2; ++i)
                        r += (v[m] * v[i] + jv[m] * jv[i]) * f.grada.at(n, m, i, w);
                out.grada_residual = std::max(out.grada_residual, std::abs(r));
            }
        }
    }
    return out;
}

ScalarConstants scalar_constants(const DriftSpec& spec, const DerivedFields& f,
                                 double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw std::invalid_argument("scalar_constants: lambda must be finite and >= 0");
    const Grid& g = f.w.grid;
    const int d = g.dim();
    double sup_diva2 = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += f.diva.at(n, c) * f.diva.at(n, c);
        sup_diva2 = std::max(sup_diva2, s);
    }
    if (lambda == 0.0 && std::sqrt(sup_diva2) > 1e-10)
        throw std::invalid_argument(
            "scalar_constants: lambda = 0 needs div A = 0 (gradient drift)");
    ScalarConstants out;
    out.big_k = std::max(0.0, -min_ricci_eigenvalue(spec.model));
    bool first = true;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        double expr = -0.25 * f.norma2.v[n] + f.lapw.v[n];
        if (lambda > 0.0) {
            double s = 0.0;
            for (int c = 0; c < d; ++c) s += f.diva.at(n, c) * f.diva.at(n, c);
            expr += s / (4.0 * lambda);
        }
        if (first || expr > out.k1) out.k1 = expr;
        first = false;
    }
    out.k2 = std::max(0.0, -f.w.min());
    return out;
}

MatrixHypothesisFlags matrix_hypothesis_flags(const ManifoldModel& model,
                                              const DerivedFields& f) {
    MatrixHypothesisFlags out;
    if (model.flat()) {
        out.sectional_min = 0.0;
        out.ricci_parallel_residual = 0.0;
    } else if (const auto* ct = model.conformal()) {
        out.sectional_min = ct->gauss.min();
        MatrixGridField rc(model.grid());
        for (std::size_t n = 0; n < rc.grid.node_count(); ++n)
            for (int i = 0; i < 2; ++i) rc.at(n, i, i) = ct->gauss.v[n];
        out.ricci_parallel_residual = covariant_grad_matrix(model, rc).max_frobenius();
    } else {
        throw std::invalid_argument("matrix_hypothesis_flags: model has no grid support");
    }
    out.a_parallel_residual = f.grada.max_frobenius();
    constexpr double tol = 1e-8;
    out.sectional_ok = out.sectional_min >= -tol;
    out.ricci_parallel_ok = out.ricci_parallel_residual <= tol;
    out.a_parallel_ok = out.a_parallel_residual <= tol;
    return out;
}

HypothesisReport hypothesis_report(const DriftSpec& spec, const DerivedFields& f,
                                   double lambda) {
    HypothesisReport rep;
    rep.flags = matrix_hypothesis_flags(spec.model, f);
    rep.sectional_min = rep.flags.sectional_min;
    rep.ricci_parallel_residual = rep.flags.ricci_parallel_residual;
    rep.a_parallel_residual = rep.flags.a_parallel_residual;
    rep.k = best_k(f);
    const ScalarConstants sc = scalar_constants(spec, f, lambda);
    rep.big_k = sc.big_k;
    rep.lambda = lambda;
    rep.k1 = sc.k1;
    rep.k2 = sc.k2;
    if (spec.model.has_complex_structure()) {
        rep.has_kahler = true;
        const Mat j = spec.model.complex_structure();
        rep.k_kahler = best_k_kahler(f, j);
        const KahlerAConditions kc = kahler_a_conditions(f, j);
        rep.kahler_a_sym_residual = kc.sym_residual;
        rep.kahler_grada_residual = kc.grada_residual;
    }
    return rep;
}

double refinement_gap(const HypothesisReport& coarse, const HypothesisReport& fine) {
    // relative with a unit floor so constants that are exactly zero at both
    // resolutions do not divide by zero
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
    };
    double gap = std::max({rel(coarse.k, fine.k), rel(coarse.big_k, fine.big_k),
                           rel(coarse.k1, fine.k1), rel(coarse.k2, fine.k2)});
    if (coarse.has_kahler && fine.has_kahler)
        gap = std::max(gap, rel(coarse.k_kahler, fine.k_kahler));
    return gap;
}

double best_lambda(const DriftSpec& spec, const DerivedFields& f, double t_eval,
                   double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo) || !(t_eval > 0.0))
        throw std::invalid_argument("best_lambda: need 0 < lo < hi and t_eval > 0");
    const double n = static_cast<double>(f.w.grid.dim());
    auto bound_c = [&](double lambda) {
        const ScalarConstants sc = scalar_constants(spec, f, lambda);
        const double big_n = sc.big_k + lambda;
        const double chi2 = big_n * big_n + (sc.k1 + 2.0 * big_n * sc.k2) / n;
        const double chi = std::sqrt(std::max(0.0, chi2));
        const double sh = std::sinh(chi * t_eval), ch = std::cosh(chi * t_eval);
        return n * sh * (big_n * sh + chi * ch);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = bound_c(x1), f2 = bound_c(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-6 * std::max(1.0, b); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = bound_c(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = bound_c(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace harnack
