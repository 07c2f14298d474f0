#pragma once

#include <complex>
#include <vector>

#include "harnacklab/grid.hpp"

// Direct discrete Fourier transforms on periodic grids. Sizes stay small
// (at most a few hundred points per axis), so the O(m^2) matrix-free form
// with a cached twiddle table is fast enough and keeps the build free of
// transform dependencies. Spectra are stored unnormalized in the same
// flattened layout as grid fields; inverse and point evaluation divide by
// the node count.

namespace harnack::spectral {

using cplx = std::complex<double>;

class Dft {
public:
    explicit Dft(int m);
    int size() const { return m_; }
    // out[k] = sum_j in[j] e^{-2 pi i j k / m}, strided access
    void forward(const cplx* in, std::size_t stride_in, cplx* out, std::size_t stride_out) const;
    // out[j] = (1/m) sum_k in[k] e^{+2 pi i j k / m}
    void inverse(const cplx* in, std::size_t stride_in, cplx* out, std::size_t stride_out) const;

private:
    int m_;
    std::vector<cplx> w_;  // w_[r] = e^{-2 pi i r / m}
};

const Dft& dft_for(int m);

// signed integer mode index in (-m/2, m/2]; j = m/2 maps to +m/2 (Nyquist)
inline int signed_mode(int j, int m) { return j <= m / 2 ? j : j - m; }

// angular wavenumber 2*pi*signed_mode/L
double wavenumber(const Grid& g, int axis, int j);

std::vector<cplx> forward(const ScalarGridField& f);
ScalarGridField to_real_field(const std::vector<cplx>& spec, const Grid& g);

// multiply by (i k_axis)^order; odd orders zero the Nyquist mode
void apply_derivative(std::vector<cplx>& spec, const Grid& g, int axis, int order);
// multiply by e^{-|k|^2 tau}
void apply_heat(std::vector<cplx>& spec, const Grid& g, double tau);

// d^order/dx_axis^order via line transforms; order 1 or 2
ScalarGridField derivative(const ScalarGridField& f, int axis, int order);

// trigonometric interpolation of the band-limited field at an arbitrary point;
// Nyquist modes contribute through their cosine part
double eval(const std::vector<cplx>& spec, const Grid& g, const Point& x);

}  // namespace harnack::spectral
