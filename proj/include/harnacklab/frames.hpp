#pragma once

#include <vector>

#include "harnacklab/drift.hpp"
#include "harnacklab/logfield.hpp"
#include "harnacklab/smallmat.hpp"
#include "harnacklab/solver.hpp"

// Proof machinery along flow lines of Y_t = -2 grad log rho_t - X: the flow
// map, parallel adapted frames, and residuals of the matrix Bochner identity
// and the evolution equation of Y_t. Flat tori only; parallel transport along
// the path is componentwise there, and the adapted rotation (the orthogonal
// change of frame and its antisymmetric generator) is carried implicitly by
// the frame matrix and S^Sk. Off-grid values come from trigonometric
// interpolation; between snapshots, fields are linear in time. Frame samples
// are stored at the path's sample times, so when the path is sampled on the
// snapshot grid every stored matrix is free of time interpolation.

namespace harnack {

struct YTrajectory {
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> times;
    std::vector<VectorGridField> fields;
};

// Y_t per snapshot; rejects nonpositive snapshots
YTrajectory build_y(const Trajectory& traj, const DriftSpec& spec,
                    LogRoute route = LogRoute::automatic);

struct FlowPath {
    std::vector<double> times;
    std::vector<Point> points;  // wrapped into the fundamental domain
};

// RK4 on xdot = Y(t, x) from t0 to t1; dt = 0 uses the snapshot spacing.
// [t0, t1] must lie inside the trajectory's time range.
FlowPath integrate_flow(const YTrajectory& yt, const Point& x0, double t0, double t1,
                        double dt = 0.0);

struct FrameSample {
    double t = 0.0;
    Point x{0.0, 0.0, 0.0};
    Mat frame;   // rows are the frame vectors v_i in grid components
    Mat s;       // S_ij = <grad Y (v_i), v_j>, rebuilt as s_sym + s_skew
    Mat s_sym;   // exactly symmetric
    Mat s_skew;  // exactly antisymmetric
    Mat b;       // <grad(grad div Y - A(Y) + grad W)(v_i), v_j>
    Mat r;       // curvature term; zero on flat tori
    Mat d;       // <(grad_{v_i} A)(v_j), Y>
    Mat e;       // <hess(div Y)(v_i), v_j>
    Mat f;       // <hess(W)(v_i), v_j>
    double ortho_drift = 0.0;  // max |<v_i,v_j> - delta_ij| before correction
    double correction = 0.0;   // magnitude of the re-orthonormalization applied
};

struct FrameTrajectory {
    int n = 0;
    std::vector<FrameSample> samples;
};

// Propagate the standard frame along the path by vdot_i = sum_j S^Sk_ij v_j
// (RK4 between path samples); re-orthonormalize when the Gram deviation
// exceeds 1e-10 and log the correction. Records S, B, R, D, E, F per sample.
FrameTrajectory transport_adapted_frame(const FlowPath& path, const YTrajectory& yt,
                                        const DriftSpec& spec, const DerivedFields& fields);

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> values;
    double max_value = 0.0;
};

struct BochnerResult {
    ResidualSeries matrix;  // Frobenius norm per interior sample
    ResidualSeries traced;  // |trace| of the same residual (scalar Bochner form)
};

// Residual of d/dt S^Sy + (S^Sy)^2 + S^Sy S^Sk - S^Sk S^Sy + (S^Sk)^2 - B^Sy + R
// with the material time derivative by centered differences over `stride`
// samples; stride > 1 measures the same identity at a coarser effective dt.
BochnerResult bochner_residual(const FrameTrajectory& ft, int stride = 1);

// Sup-norm residual over trusted nodes of
//   Ydot + grad_Y Y - grad div Y + A(Y) - grad W
// with Ydot by centered differences at interior snapshots.
ResidualSeries eqy_residual(const Trajectory& traj, const DriftSpec& spec,
                            const DerivedFields& fields, LogRoute route = LogRoute::automatic);

// Residual of d/dt log rho = lap log rho + |grad log rho + X/2|^2 - |X|^2/4 + U.
ResidualSeries dlog_identity_residual(const Trajectory& traj, const DriftSpec& spec,
                                      LogRoute route = LogRoute::automatic);

}  // namespace harnack
