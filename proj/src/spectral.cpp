#include "harnacklab/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace harnack::spectral {

Dft::Dft(int m) : m_(m), w_(m) {
    if (m < 2) throw std::invalid_argument("dft: size must be >= 2");
    for (int r = 0; r < m; ++r) {
        const double ang = -2.0 * std::numbers::pi * r / m;
        w_[r] = cplx(std::cos(ang), std::sin(ang));
    }
}

void Dft::forward(const cplx* in, std::size_t stride_in, cplx* out, std::size_t stride_out) const {
    for (int k = 0; k < m_; ++k) {
        cplx acc(0.0, 0.0);
        std::size_t idx = 0;
        for (int j = 0; j < m_; ++j) {
            acc += in[j * stride_in] * w_[idx];
            idx += k;
            if (idx >= static_cast<std::size_t>(m_)) idx -= m_;
        }
        out[k * stride_out] = acc;
    }
}

void Dft::inverse(const cplx* in, std::size_t stride_in, cplx* out, std::size_t stride_out) const {
    const double inv = 1.0 / m_;
    for (int j = 0; j < m_; ++j) {
        cplx acc(0.0, 0.0);
        std::size_t idx = 0;
        for (int k = 0; k < m_; ++k) {
            acc += in[k * stride_in] * std::conj(w_[idx]);
            idx += j;
            if (idx >= static_cast<std::size_t>(m_)) idx -= m_;
        }
        out[j * stride_out] = acc * inv;
    }
}

const Dft& dft_for(int m) {
    static std::map<int, std::unique_ptr<Dft>> cache;
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::make_unique<Dft>(m)).first;
    return *it->second;
}

double wavenumber(const Grid& g, int axis, int j) {
    return 2.0 * std::numbers::pi * signed_mode(j, g.points(axis)) / g.period(axis);
}

namespace {

// apply a 1-d transform along `axis` to every line of the complex buffer
template <typename Op>
void transform_axis(std::vector<cplx>& data, const Grid& g, int axis, Op&& op) {
    const int m = g.points(axis);
    std::size_t stride = 1;
    for (int a = axis + 1; a < 3; ++a) stride *= g.points(a);
    const std::size_t lines = g.node_count() / m;
    std::vector<cplx> tmp(m);
    // enumerate line origins: all nodes whose index along `axis` is zero
    for (std::size_t line = 0; line < lines; ++line) {
        // decompose line index into the non-axis coordinates
        std::size_t rem = line, origin = 0;
        for (int a = 2; a >= 0; --a) {
            if (a == axis) continue;
            std::size_t extent = g.points(a);
            std::size_t coord = rem % extent;
            rem /= extent;
            std::size_t s = 1;
            for (int b = a + 1; b < 3; ++b) s *= g.points(b);
            origin += coord * s;
        }
        op(&data[origin], stride, tmp.data());
    }
}

void forward_axis(std::vector<cplx>& data, const Grid& g, int axis) {
    const Dft& plan = dft_for(g.points(axis));
    transform_axis(data, g, axis, [&](cplx* line, std::size_t stride, cplx* tmp) {
        plan.forward(line, stride, tmp, 1);
        for (int j = 0; j < plan.size(); ++j) line[j * stride] = tmp[j];
    });
}

void inverse_axis(std::vector<cplx>& data, const Grid& g, int axis) {
    const Dft& plan = dft_for(g.points(axis));
    transform_axis(data, g, axis, [&](cplx* line, std::size_t stride, cplx* tmp) {
        plan.inverse(line, stride, tmp, 1);
        for (int j = 0; j < plan.size(); ++j) line[j * stride] = tmp[j];
    });
}

}  // namespace

std::vector<cplx> forward(const ScalarGridField& f) {
    std::vector<cplx> spec(f.v.begin(), f.v.end());
    for (int a = 0; a < f.grid.dim(); ++a) forward_axis(spec, f.grid, a);
    return spec;
}

ScalarGridField to_real_field(const std::vector<cplx>& spec, const Grid& g) {
    std::vector<cplx> work = spec;
    for (int a = 0; a < g.dim(); ++a) inverse_axis(work, g, a);
    ScalarGridField out(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) out.v[n] = work[n].real();
    return out;
}

void apply_derivative(std::vector<cplx>& spec, const Grid& g, int axis, int order) {
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("spectral: axis out of range");
    if (order < 1 || order > 4) throw std::invalid_argument("spectral: derivative order must be 1..4");
    const int m = g.points(axis);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const int j = static_cast<int>(g.unflatten(n)[axis]);
        const double k = wavenumber(g, axis, j);
        cplx mult;
        if (j == m / 2 && (order % 2 == 1)) {
            mult = 0.0;  // odd derivative of the unresolved Nyquist mode
        } else {
            cplx ik(0.0, k);
            mult = 1.0;
            for (int p = 0; p < order; ++p) mult *= ik;
        }
        spec[n] *= mult;
    }
}

void apply_heat(std::vector<cplx>& spec, const Grid& g, double tau) {
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        auto idx = g.unflatten(n);
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double k = wavenumber(g, a, idx[a]);
            k2 += k * k;
        }
        spec[n] *= std::exp(-k2 * tau);
    }
}

ScalarGridField derivative(const ScalarGridField& f, int axis, int order) {
    if (!f.all_finite()) throw std::invalid_argument("spectral: non-finite field values");
    const Grid& g = f.grid;
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("spectral: axis out of range");
    if (order < 1 || order > 2) throw std::invalid_argument("spectral: order must be 1 or 2");

    std::vector<cplx> work(f.v.begin(), f.v.end());
    forward_axis(work, g, axis);
    const int m = g.points(axis);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const int j = static_cast<int>(g.unflatten(n)[axis]);
        const double k = wavenumber(g, axis, j);
        if (order == 1) {
            work[n] *= (j == m / 2) ? cplx(0.0, 0.0) : cplx(0.0, k);
        } else {
            work[n] *= -k * k;
        }
    }
    inverse_axis(work, g, axis);
    ScalarGridField out(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) out.v[n] = work[n].real();
    return out;
}

double eval(const std::vector<cplx>& spec, const Grid& g, const Point& x) {
    // per-axis mode factors; the Nyquist column keeps only its cosine part
    std::array<std::vector<cplx>, 3> fac;
    for (int a = 0; a < g.dim(); ++a) {
        const int m = g.points(a);
        fac[a].resize(m);
        for (int j = 0; j < m; ++j) {
            const double k = wavenumber(g, a, j);
            if (j == m / 2)
                fac[a][j] = cplx(std::cos(k * x[a]), 0.0);
            else
                fac[a][j] = cplx(std::cos(k * x[a]), std::sin(k * x[a]));
        }
    }
    for (int a = g.dim(); a < 3; ++a) fac[a].assign(1, cplx(1.0, 0.0));

    cplx acc(0.0, 0.0);
    std::size_t n = 0;
    for (int j0 = 0; j0 < g.points(0); ++j0) {
        for (int j1 = 0; j1 < g.points(1); ++j1) {
            const cplx f01 = fac[0][j0] * fac[1][j1];
            for (int j2 = 0; j2 < g.points(2); ++j2, ++n) acc += spec[n] * f01 * fac[2][j2];
        }
    }
    return acc.real() / static_cast<double>(g.node_count());
}

}  // namespace harnack::spectral
