#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/smallmat.hpp"

// Independent reference implementations used only by tests: finite
// differences, a trig-polynomial field with closed-form derivatives, and an
// adaptive Simpson integrator. Deliberately written with different methods
// than the library under test.

namespace oracle {

inline std::size_t neighbor(const harnack::Grid& g, std::size_t node, int axis, int shift) {
    auto idx = g.unflatten(node);
    const int m = g.points(axis);
    idx[axis] = ((idx[axis] + shift) % m + m) % m;
    return g.flatten(idx[0], idx[1], idx[2]);
}

// periodic central differences, accuracy 2 or 4, derivative order 1 or 2
inline harnack::ScalarGridField fd_derivative(const harnack::ScalarGridField& f, int axis,
                                              int order, int accuracy = 2) {
    const harnack::Grid& g = f.grid;
    const double h = g.spacing(axis);
    harnack::ScalarGridField out(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const double fm2 = f.v[neighbor(g, n, axis, -2)];
        const double fm1 = f.v[neighbor(g, n, axis, -1)];
        const double f0 = f.v[n];
        const double fp1 = f.v[neighbor(g, n, axis, 1)];
        const double fp2 = f.v[neighbor(g, n, axis, 2)];
        if (order == 1 && accuracy == 2)
            out.v[n] = (fp1 - fm1) / (2.0 * h);
        else if (order == 1)
            out.v[n] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
        else if (order == 2 && accuracy == 2)
            out.v[n] = (fp1 - 2.0 * f0 + fm1) / (h * h);
        else
            out.v[n] = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    return out;
}

// sum of cosine waves; every derivative is available in closed form
struct TrigPoly {
    struct Term {
        std::array<double, 3> k{0.0, 0.0, 0.0};  // angular wavenumbers
        double amp = 0.0;
        double phase = 0.0;
    };
    std::vector<Term> terms;

    double value(const harnack::Point& x) const {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.amp * std::cos(t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2] + t.phase);
        return s;
    }
    // d^order / dx_axis^order; each derivative multiplies by k and quarter-turns the phase
    double derivative(const harnack::Point& x, int axis, int order) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double factor = 1.0;
            for (int p = 0; p < order; ++p) factor *= t.k[axis];
            const double arg = t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2] + t.phase +
                               order * std::numbers::pi / 2.0;
            s += t.amp * factor * std::cos(arg);
        }
        return s;
    }
    harnack::ScalarGridField sample(const harnack::Grid& g) const {
        harnack::ScalarGridField f(g);
        for (std::size_t n = 0; n < g.node_count(); ++n) f.v[n] = value(g.coordinate(n));
        return f;
    }
};

// band-limited random field: integer modes up to a quarter of each axis
inline TrigPoly random_trig(const harnack::Grid& g, int nterms, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    TrigPoly poly;
    for (int t = 0; t < nterms; ++t) {
        TrigPoly::Term term;
        for (int a = 0; a < g.dim(); ++a) {
            std::uniform_int_distribution<int> mode(-g.points(a) / 4, g.points(a) / 4);
            term.k[a] = 2.0 * std::numbers::pi * mode(gen) / g.period(a);
        }
        term.amp = amp(gen);
        term.phase = ph(gen);
        poly.terms.push_back(term);
    }
    return poly;
}

inline harnack::ScalarGridField random_field(const harnack::Grid& g, unsigned seed,
                                             double amplitude = 1.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    harnack::ScalarGridField f(g);
    for (auto& x : f.v) x = dist(gen);
    return f;
}

// ---- metric-based geometry references (2-d charts, diagonal metrics) ----

using MetricFn = std::function<harnack::Mat(const harnack::Point&)>;

inline harnack::Point shifted(harnack::Point p, int axis, double d) {
    p[axis] += d;
    return p;
}

// Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), derivatives by
// central differences of the metric callback
inline double fd_christoffel(const MetricFn& metric, const harnack::Point& p, int k, int i, int j,
                             double h = 1e-5) {
    const harnack::Mat g = metric(p);
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    harnack::Mat ginv = harnack::Mat::zero(2);
    ginv(0, 0) = g(1, 1) / det;
    ginv(1, 1) = g(0, 0) / det;
    ginv(0, 1) = -g(0, 1) / det;
    ginv(1, 0) = -g(1, 0) / det;

    auto dg = [&](int axis, int a, int b) {
        return (metric(shifted(p, axis, h))(a, b) - metric(shifted(p, axis, -h))(a, b)) / (2.0 * h);
    };
    double sum = 0.0;
    for (int l = 0; l < 2; ++l) sum += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
    return 0.5 * sum;
}

// frame components of the curvature tensor from the metric alone, with the
// library's sign convention (sectional(u,v) = Rm(u,v,u,v), sphere positive):
// R^l_ijk = d_j Gamma^l_ik - d_i Gamma^l_jk + G^m_ik G^l_jm - G^m_jk G^l_im
inline double fd_riemann_frame(const MetricFn& metric, const harnack::Point& p, int a, int b,
                               int c, int d, double h = 1e-4) {
    auto gamma = [&](const harnack::Point& q, int k, int i, int j) {
        return fd_christoffel(metric, q, k, i, j);
    };
    auto dgamma = [&](int axis, int k, int i, int j) {
        return (gamma(shifted(p, axis, h), k, i, j) - gamma(shifted(p, axis, -h), k, i, j)) /
               (2.0 * h);
    };
    const harnack::Mat g = metric(p);
    double rm = 0.0;  // Rm_coord(a,b,c,d) = g_dm R^m_abc
    for (int m = 0; m < 2; ++m) {
        double r = dgamma(b, m, a, c) - dgamma(a, m, b, c);
        for (int e = 0; e < 2; ++e)
            r += gamma(p, e, a, c) * gamma(p, m, b, e) - gamma(p, e, b, c) * gamma(p, m, a, e);
        rm += g(d, m) * r;
    }
    // orthonormal frame for a diagonal metric: divide by the axis norms
    const double norm = std::sqrt(g(a, a) * g(b, b) * g(c, c) * g(d, d));
    return rm / norm;
}

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Explicit finite-difference reference for rho_t = Lap rho + <grad rho, X>
// + U rho on a flat torus: second-order central stencils in space, forward
// Euler in time with a diffusive stability cap. Returns the state after
// `span` time units.
inline harnack::ScalarGridField fd_heat_solve(const harnack::VectorGridField& x,
                                              const harnack::ScalarGridField& u,
                                              harnack::ScalarGridField rho, double span,
                                              double dt_request) {
    const harnack::Grid& g = rho.grid;
    const int d = g.dim();
    double cap = 0.0;
    for (int a = 0; a < d; ++a) cap += 2.0 / (g.spacing(a) * g.spacing(a));
    double dt = std::min(dt_request, 0.5 / cap);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-12)));
    dt = span / static_cast<double>(steps);
    harnack::ScalarGridField next(g);
    for (long k = 0; k < steps; ++k) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            double rhs = u.v[n] * rho.v[n];
            for (int a = 0; a < d; ++a) {
                const double h = g.spacing(a);
                const double fp = rho.v[neighbor(g, n, a, 1)];
                const double fm = rho.v[neighbor(g, n, a, -1)];
                rhs += (fp - 2.0 * rho.v[n] + fm) / (h * h);
                rhs += x.at(n, a) * (fp - fm) / (2.0 * h);
            }
            next.v[n] = rho.v[n] + dt * rhs;
        }
        std::swap(rho.v, next.v);
    }
    return rho;
}

}  // namespace oracle
