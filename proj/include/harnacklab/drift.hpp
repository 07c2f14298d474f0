#pragma once

#include "harnacklab/covariant.hpp"
#include "harnacklab/grid.hpp"
#include "harnacklab/manifold.hpp"

// Drift data for rho_t = Lap rho + <grad rho, X> + U rho and everything
// derived from it. The effective potential is W = div X + |X|^2/2 - 2U;
// A = grad X - (grad X)* is the drift's antisymmetric part, the obstruction
// to X being a gradient.

namespace harnack {

struct DriftSpec {
    ManifoldModel model;
    VectorGridField x;  // frame components on the model grid
    ScalarGridField u;
};

struct DerivedFields {
    MatrixGridField gradx;
    MatrixGridField a;      // grad X - (grad X)^T, exactly antisymmetric
    MatrixGridField symx;   // grad X + (grad X)^T
    ScalarGridField divx;
    ScalarGridField w;
    VectorGridField gradw;
    MatrixGridField hessw;
    ScalarGridField lapw;
    Tensor3GridField grada;  // (grad A)(m,i,j), direction in the first slot
    VectorGridField diva;    // (div A)_j = sum_i (grad A)(i,i,j)
    ScalarGridField norma2;  // |A|^2 pointwise
};

// validates grids and finiteness; throws std::invalid_argument
DriftSpec make_drift(const ManifoldModel& model, const VectorGridField& x,
                     const ScalarGridField& u);

DerivedFields derive(const DriftSpec& spec);

// Max deviation between the W assembled in derive() and a recomputation in
// which div X is differentiated through an independent code path.
double w_precision_check(const DriftSpec& spec);

}  // namespace harnack
