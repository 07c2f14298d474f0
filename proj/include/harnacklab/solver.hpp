#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "harnacklab/drift.hpp"
#include "harnacklab/grid.hpp"

// Evolve positive solutions of rho_t = Lap rho + <grad rho, X> + U rho on
// flat tori. Stepping is a Strang composition: exact spectral diffusion for
// half a step, midpoint RK2 on the drift/reaction terms, diffusion for the
// other half. That keeps the scheme second order in dt, which the residual
// convergence checks rely on, while the diffusion multiplier e^{-|k|^2 dt}
// stays exact per substep.

namespace harnack {

struct Trajectory {
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> times;
    std::vector<ScalarGridField> snapshots;
    std::vector<double> mass;     // integral of rho per snapshot
    std::vector<double> min_rho;  // grid minimum per snapshot
    double dt_used = 0.0;
    std::vector<std::string> warnings;
};

struct SolverAbort : std::runtime_error {
    SolverAbort(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
    double time;
};

struct SolveOptions {
    int stride = 0;           // snapshot every this many steps; 0 = choose
    int max_snapshots = 200;  // stride is widened until the run fits
};

// Positivity: the solver aborts when min rho dips below -1e-10 * max|rho|.
// Resolved solutions stay strictly positive; the relative threshold tolerates
// spectral roundoff in far tails that underflow to ~0, while genuine sign
// loss (under-resolved data, instability) still aborts with "positivity
// lost" and the offending time. Surviving roundoff-level negatives are
// clamped to the smallest normal double, so stored snapshots always have
// min_rho > 0.
Trajectory solve(const DriftSpec& spec, const ScalarGridField& rho0, double t_start,
                 double t_end, double dt, const SolveOptions& opts = {});

// Periodized Gaussian with unit mass, sum over lattice images of
// (4 pi t0)^{-n/2} exp(-|x - center + Lm|^2 / (4 t0)), floored at the
// smallest normal double so the field stays strictly positive.
ScalarGridField heat_kernel_seed(const Grid& grid, const Point& center, double t0);

// Max relative deviation between the time-differentiated snapshot masses and
// the quadrature of rho (U - div X); needs at least 3 snapshots.
double mass_balance_check(const Trajectory& traj, const DriftSpec& spec);

// integral of the field over the torus (trapezoid = exact mean times volume)
double integral(const ScalarGridField& f);

}  // namespace harnack
