#include "harnacklab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "harnacklab/spectral.hpp"

namespace harnack {

namespace {

double torus_volume(const Grid& g) {
    double vol = 1.0;
    for (int a = 0; a < g.dim(); ++a) vol *= g.period(a);
    return vol;
}

double mean_value(const ScalarGridField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / static_cast<double>(f.grid.node_count());
}

// drift/reaction vector field G(rho) = <grad rho, X> + U rho
ScalarGridField drift_reaction(const DriftSpec& spec, const ScalarGridField& rho) {
    const Grid& g = rho.grid;
    ScalarGridField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const ScalarGridField da = spectral::derivative(rho, a, 1);
        for (std::size_t n = 0; n < g.node_count(); ++n)
            out.v[n] += spec.x.at(n, a) * da.v[n];
    }
    for (std::size_t n = 0; n < g.node_count(); ++n)
        out.v[n] += spec.u.v[n] * rho.v[n];
    return out;
}

// Abort on non-finite values or on negativity beyond transform roundoff;
// then clamp the surviving roundoff-level negatives to the smallest normal
// double so stored snapshots stay strictly positive. The clamp only touches
// nodes whose computed value is below the noise floor of the transforms.
void check_state(ScalarGridField& rho, double t) {
    double lo = rho.v[0], hi = 0.0;
    for (double x : rho.v) {
        if (!std::isfinite(x)) throw SolverAbort("solver state non-finite", t);
        lo = std::min(lo, x);
        hi = std::max(hi, std::abs(x));
    }
    if (lo <= -1e-10 * hi) {
        std::ostringstream msg;
        msg << "positivity lost at t = " << t;
        throw SolverAbort(msg.str(), t);
    }
    if (lo < std::numeric_limits<double>::min())
        for (double& x : rho.v) x = std::max(x, std::numeric_limits<double>::min());
}

}  // namespace

double integral(const ScalarGridField& f) {
    return mean_value(f) * torus_volume(f.grid);
}

Trajectory solve(const DriftSpec& spec, const ScalarGridField& rho0, double t_start,
                 double t_end, double dt, const SolveOptions& opts) {
    if (!spec.model.flat())
        throw std::invalid_argument("solve: only flat tori are supported");
    const Grid& g = spec.model.grid();
    if (!(rho0.grid == g))
        throw std::invalid_argument("solve: rho0 must live on the model grid");
    if (!rho0.all_finite() || rho0.min() <= 0.0)
        throw std::invalid_argument("solve: rho0 must be finite and positive");
    if (!(t_end > t_start) || t_start < 0.0 || !std::isfinite(t_end))
        throw std::invalid_argument("solve: need 0 <= t_start < t_end");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("solve: dt must be positive");
    if (opts.max_snapshots < 2)
        throw std::invalid_argument("solve: max_snapshots must be at least 2");

    Trajectory traj;
    traj.grid = g;

    // explicit drift/reaction stability bound, with automatic reduction
    const double h = g.min_spacing();
    double bound = h * h;
    const double supx = spec.x.max_norm();
    const double supu = spec.u.max_abs();
    if (supx > 0.0) bound = std::min(bound, h / (4.0 * supx));
    if (supu > 0.0) bound = std::min(bound, 1.0 / (4.0 * supu));
    double dt_eff = dt;
    if (dt_eff > bound) {
        dt_eff = bound;
        std::ostringstream msg;
        msg << "dt reduced from " << dt << " to stability bound " << bound;
        traj.warnings.push_back(msg.str());
    }

    const double span = t_end - t_start;
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt_eff - 1e-12)));
    const double delta = span / static_cast<double>(steps);
    traj.dt_used = delta;

    long stride = std::max<long>(1, opts.stride);
    const long max_snap = opts.max_snapshots;
    while (steps / stride + 2 > max_snap) ++stride;

    const bool has_drift = supx > 0.0 || supu > 0.0;

    auto store = [&](const ScalarGridField& rho, double t) {
        traj.times.push_back(t);
        traj.snapshots.push_back(rho);
        traj.mass.push_back(integral(rho));
        traj.min_rho.push_back(rho.min());
    };

    ScalarGridField rho = rho0;
    store(rho, t_start);
    for (long k = 1; k <= steps; ++k) {
        const double t = t_start + delta * static_cast<double>(k);
        if (has_drift) {
            auto sp = spectral::forward(rho);
            spectral::apply_heat(sp, g, 0.5 * delta);
            rho = spectral::to_real_field(sp, g);
            const ScalarGridField g1 = drift_reaction(spec, rho);
            ScalarGridField mid = rho;
            for (std::size_t n = 0; n < g.node_count(); ++n)
                mid.v[n] += 0.5 * delta * g1.v[n];
            const ScalarGridField g2 = drift_reaction(spec, mid);
            for (std::size_t n = 0; n < g.node_count(); ++n)
                rho.v[n] += delta * g2.v[n];
            sp = spectral::forward(rho);
            spectral::apply_heat(sp, g, 0.5 * delta);
            rho = spectral::to_real_field(sp, g);
        } else {
            auto sp = spectral::forward(rho);
            spectral::apply_heat(sp, g, delta);
            rho = spectral::to_real_field(sp, g);
        }
        check_state(rho, t);
        if (k == steps || k % stride == 0) store(rho, t);
    }
    return traj;
}

ScalarGridField heat_kernel_seed(const Grid& grid, const Point& center, double t0) {
    if (!(t0 > 0.0) || !std::isfinite(t0))
        throw std::invalid_argument("heat_kernel_seed: t0 must be positive");
    const double width = std::sqrt(2.0 * t0);
    for (int a = 0; a < grid.dim(); ++a)
        if (!(width < grid.period(a) / 8.0))
            throw std::invalid_argument(
                "heat_kernel_seed: Gaussian width too large for the torus period");

    const double inv4t = 1.0 / (4.0 * t0);
    const double prefactor_1d = 1.0 / std::sqrt(4.0 * M_PI * t0);
    auto theta = [&](double d, double period) {
        double s = std::exp(-d * d * inv4t);
        for (int m = 1; m < 64; ++m) {
            const double dp = d + period * m, dm = d - period * m;
            const double add = std::exp(-dp * dp * inv4t) + std::exp(-dm * dm * inv4t);
            s += add;
            if (add <= 1e-16 * s) break;
        }
        return prefactor_1d * s;
    };

    ScalarGridField out(grid);
    const double floor_val = std::numeric_limits<double>::min();
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const Point x = grid.coordinate(n);
        double val = 1.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double L = grid.period(a);
            double d = std::fmod(x[a] - center[a], L);
            if (d > 0.5 * L) d -= L;
            if (d < -0.5 * L) d += L;
            val *= theta(d, L);
        }
        out.v[n] = std::max(val, floor_val);
    }
    return out;
}

double mass_balance_check(const Trajectory& traj, const DriftSpec& spec) {
    if (traj.times.size() < 3)
        throw std::invalid_argument("mass_balance_check: need at least 3 snapshots");
    const Grid& g = traj.grid;
    const ScalarGridField divx = covariant_divergence(spec.model, spec.x);
    ScalarGridField source(g);  // U - div X
    for (std::size_t n = 0; n < g.node_count(); ++n)
        source.v[n] = spec.u.v[n] - divx.v[n];

    double scale = 0.0;
    for (double m : traj.mass) scale = std::max(scale, std::abs(m));
    if (scale == 0.0) scale = 1.0;

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.times.size(); ++i) {
        const double hp = traj.times[i + 1] - traj.times[i];
        const double hm = traj.times[i] - traj.times[i - 1];
        const double dmdt = (hm * hm * traj.mass[i + 1] - hp * hp * traj.mass[i - 1] +
                             (hp * hp - hm * hm) * traj.mass[i]) /
                            (hp * hm * (hp + hm));
        ScalarGridField prod(g);
        for (std::size_t n = 0; n < g.node_count(); ++n)
            prod.v[n] = traj.snapshots[i].v[n] * source.v[n];
        const double q = integral(prod);
        worst = std::max(worst, std::abs(dmdt - q) / scale);
    }
    return worst;
}

}  // namespace harnack
