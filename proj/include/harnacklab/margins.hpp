#pragma once

#include <string>
#include <vector>

#include "harnacklab/drift.hpp"
#include "harnacklab/logfield.hpp"
#include "harnacklab/solver.hpp"

// Pointwise margins of the differential Harnack inequalities. A margin is
// the inequality's left-hand side arranged so the theorem asserts margin >= 0;
// reports keep the raw minima (negative values are never clamped) and a run
// passes iff the global minimum stays above -tolerance. Slices at t = 0 are
// skipped: the bounds are singular or vacuous there. Slice evaluation is
// independent per snapshot and reduced in time order, so minima are
// deterministic.

namespace harnack {

// Constants of the scalar Harnack parameter system. chi is derived from the
// others and kept consistent by the factories:
//   chi = sqrt((K + lambda)^2 + (k1 + 2 (K + lambda) k2) / n) >= 0.
struct HarnackParams {
    double k = 0.0;      // matrix/Kahler curvature-potential rate
    double big_k = 0.0;  // Ricci lower bound is -big_k
    double lambda = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double chi = 0.0;
    int n = 1;
};

HarnackParams make_params(double k, double big_k, double lambda, double k1, double k2, int n);
// reduction with lambda = k1 = k2 = 0, so chi = big_k
HarnackParams li_xu_params(double big_k, int n);

struct Abc {
    double a = 0.0, b = 0.0, c = 0.0;
};

// Statement-form coefficients: with N = K + lambda, s = sinh(chi t),
//   a = s^2 + N q,  b = -N q,  c = n s (N s + chi cosh(chi t)),
// where q = sinh cosh / chi - t. Requires t >= 0 and chi > 0; chi = 0 makes
// all three vanish identically and is rejected with a redirect to
// li_yau_margin.
Abc abc_parameters(const HarnackParams& p, double t);

struct SliceMargin {
    double t = 0.0;
    double min_margin = 0.0;
    Point argmin{0.0, 0.0, 0.0};
    double coverage = 1.0;  // trusted fraction of the slice
};

struct MarginReport {
    std::string inequality;
    std::vector<SliceMargin> slices;
    double global_min = 0.0;
    Point global_argmin{0.0, 0.0, 0.0};
    double global_argmin_time = 0.0;
    double tolerance = 1e-3;
    bool pass = false;
    std::string route;  // log-derivative route: "spectral", "stencil", or "mixed"
    double min_coverage = 1.0;
    bool hypothesis_override = false;
    std::string metadata;
};

struct MarginOptions {
    double tolerance = 1e-3;
    LogRoute route = LogRoute::automatic;
    // evaluate even when the hypothesis flags fail; recorded in the report
    bool hypothesis_override = false;
};

// margin = lambda_min(hess log rho + (grad X + (grad X)*)/4) + kcoth(k, t)/2
MarginReport matrix_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, double k,
                           const MarginOptions& opts = {});

// margin = lambda_min(H + J^T H J + (M + J^T M J)/4) + kcoth(k, t),
// H = hess log rho, M = grad X + (grad X)*
MarginReport kahler_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, double k,
                           const MarginOptions& opts = {});

// margin = a (lap log rho + div X / 2) - b |grad log rho + X/2|^2 + b W / 2 + c / 2
MarginReport scalar_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, const HarnackParams& params,
                           const MarginOptions& opts = {});

// scalar margin with li_xu_params(big_k, n); requires big_k > 0
MarginReport li_xu_margin(const Trajectory& traj, const DriftSpec& spec,
                          const DerivedFields& fields, double big_k,
                          const MarginOptions& opts = {});

// margin = lap log rho + n / (2 t); drift-free trajectories only
MarginReport li_yau_margin(const Trajectory& traj, const DriftSpec& spec,
                           const MarginOptions& opts = {});

// For gradient drift X = grad f: max pointwise deviation between the matrix
// margin's correction (grad X + (grad X)*)/4 and hess(f)/2, with f recovered
// spectrally from X. Rejects non-gradient drift.
double gradient_case_reduction_check(const DriftSpec& spec, const DerivedFields& fields);

}  // namespace harnack
