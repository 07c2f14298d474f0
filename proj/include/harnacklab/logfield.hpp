#pragma once

#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/manifold.hpp"

// Derivatives of log rho for one positive snapshot. Both routes act on the
// pointwise log field, never on quotients of derivative fields:
//  - spectral: trigonometric differentiation, spectrally accurate when the
//    solution is bounded away from zero so log rho is smooth on the grid;
//  - stencil: second-order centered differences, used when the field has
//    underflowed tails (heat seeds). There the clamped log field carries a
//    slope break, and global trigonometric differentiation of that break
//    would ring across the whole domain; local stencils keep the damage
//    confined to the untrusted tail.
// Automatic selection takes the stencil route when min/max < 1e-6. Nodes
// with rho < 1e-8 * max carry no trustworthy log derivatives; trust marks
// the complement and coverage is its fraction of the grid.

namespace harnack {

enum class LogRoute { automatic, spectral, stencil };

struct LogDerivatives {
    ScalarGridField logrho;
    VectorGridField grad;  // frame components of grad log rho
    MatrixGridField hess;  // covariant Hessian of log rho
    ScalarGridField lap;   // trace of hess
    std::vector<unsigned char> trust;
    double coverage = 1.0;
    bool used_stencils = false;
};

LogDerivatives log_derivatives(const ManifoldModel& model, const ScalarGridField& rho,
                               LogRoute route = LogRoute::automatic);

}  // namespace harnack
