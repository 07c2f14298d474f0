#include "harnacklab/margins.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "harnacklab/covariant.hpp"
#include "harnacklab/hypotheses.hpp"
#include "harnacklab/special.hpp"
#include "harnacklab/spectral.hpp"

namespace harnack {

namespace {

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(name) + " is not finite");
}

void check_run_inputs(const Trajectory& traj, const DriftSpec& spec) {
    if (traj.times.size() < 2 || traj.snapshots.size() != traj.times.size())
        throw std::invalid_argument("margin: trajectory is empty or inconsistent");
    if (!(traj.grid == spec.model.grid()) || !(spec.x.grid == traj.grid))
        throw std::invalid_argument("margin: trajectory and drift grids do not match");
}

Mat node_sym(const MatrixGridField& f, std::size_t n) {
    Mat m = Mat::zero(f.grid.dim());
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) m(i, j) = 0.5 * (f.at(n, i, j) + f.at(n, j, i));
    return m;
}

// One slice of a margin report: minimize the node margin over the trusted
// set. The node margin callback receives the node index and its log
// derivatives.
template <typename NodeMargin>
void reduce_slices(MarginReport& rep, const Trajectory& traj, const ManifoldModel& model,
                   const MarginOptions& opts, NodeMargin&& node_margin) {
    bool any_spectral = false, any_stencil = false;
    rep.min_coverage = 1.0;
    rep.global_min = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        const double t = traj.times[s];
        if (t <= 0.0) continue;
        const ScalarGridField& snap = traj.snapshots[s];
        if (snap.min() <= 0.0)
            throw std::invalid_argument("margin: nonpositive rho in snapshot");
        const LogDerivatives ld = log_derivatives(model, snap, opts.route);
        (ld.used_stencils ? any_stencil : any_spectral) = true;
        SliceMargin slice;
        slice.t = t;
        slice.coverage = ld.coverage;
        slice.min_margin = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < snap.v.size(); ++n) {
            if (!ld.trust[n]) continue;
            const double m = node_margin(n, ld, t);
            if (m < slice.min_margin) {
                slice.min_margin = m;
                slice.argmin = traj.grid.coordinate(n);
            }
        }
        rep.min_coverage = std::min(rep.min_coverage, slice.coverage);
        if (slice.min_margin < rep.global_min) {
            rep.global_min = slice.min_margin;
            rep.global_argmin = slice.argmin;
            rep.global_argmin_time = t;
        }
        rep.slices.push_back(slice);
    }
    if (rep.slices.empty())
        throw std::invalid_argument("margin: no snapshot at positive time");
    rep.tolerance = opts.tolerance;
    rep.pass = rep.global_min >= -opts.tolerance;
    rep.route = any_stencil ? (any_spectral ? "mixed" : "stencil") : "spectral";
}

void gate_matrix_hypotheses(MarginReport& rep, const DriftSpec& spec,
                            const DerivedFields& fields, const MarginOptions& opts,
                            bool kahler) {
    const MatrixHypothesisFlags flags = matrix_hypothesis_flags(spec.model, fields);
    bool ok = flags.all_ok();
    if (kahler) {
        const KahlerAConditions ka =
            kahler_a_conditions(fields, spec.model.complex_structure());
        ok = ok && ka.sym_residual <= 1e-8 && ka.grada_residual <= 1e-8;
    }
    if (!ok) {
        if (!opts.hypothesis_override)
            throw std::invalid_argument(
                "margin: hypothesis flags fail; set hypothesis_override for exploratory runs");
        rep.hypothesis_override = true;
        rep.metadata = "hypothesis flags failed; run forced by override";
    }
}

}  // namespace

HarnackParams make_params(double k, double big_k, double lambda, double k1, double k2, int n) {
    require_finite(k, "k");
    require_finite(big_k, "K");
    require_finite(lambda, "lambda");
    require_finite(k1, "k1");
    require_finite(k2, "k2");
    if (n < 1 || n > 3) throw std::invalid_argument("params: dimension out of range");
    if (k < 0.0 || big_k < 0.0 || lambda < 0.0 || k2 < 0.0)
        throw std::invalid_argument("params: rate constants must be nonnegative");
    const double nn = big_k + lambda;
    const double radicand = nn * nn + (k1 + 2.0 * nn * k2) / n;
    if (radicand < 0.0) throw std::invalid_argument("params: chi^2 is negative");
    HarnackParams p;
    p.k = k;
    p.big_k = big_k;
    p.lambda = lambda;
    p.k1 = k1;
    p.k2 = k2;
    p.n = n;
    p.chi = std::sqrt(radicand);
    return p;
}

HarnackParams li_xu_params(double big_k, int n) {
    return make_params(0.0, big_k, 0.0, 0.0, 0.0, n);
}

Abc abc_parameters(const HarnackParams& p, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("abc: t must be nonnegative");
    if (p.chi == 0.0)
        throw std::invalid_argument("abc: chi = 0 makes a, b, c vanish; use li_yau_margin");
    const double nn = p.big_k + p.lambda;
    const double s = std::sinh(p.chi * t);
    const double c = std::cosh(p.chi * t);
    const double q = sinhcosh_over_chi_minus_t(p.chi, t);
    Abc out;
    out.a = s * s + nn * q;
    out.b = -nn * q;
    out.c = p.n * s * (nn * s + p.chi * c);
    return out;
}

MarginReport matrix_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, double k, const MarginOptions& opts) {
    check_run_inputs(traj, spec);
    require_finite(k, "k");
    if (k < 0.0) throw std::invalid_argument("matrix_margin: k must be nonnegative");
    MarginReport rep;
    rep.inequality = "matrix";
    gate_matrix_hypotheses(rep, spec, fields, opts, false);
    reduce_slices(rep, traj, spec.model, opts,
                  [&](std::size_t n, const LogDerivatives& ld, double t) {
                      Mat m = node_sym(ld.hess, n);
                      for (int i = 0; i < m.n; ++i)
                          for (int j = 0; j < m.n; ++j) m(i, j) += 0.25 * fields.symx.at(n, i, j);
                      return sym_eigs(m).min() + 0.5 * kcoth(k, t);
                  });
    return rep;
}

MarginReport kahler_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, double k, const MarginOptions& opts) {
    check_run_inputs(traj, spec);
    require_finite(k, "k");
    if (k < 0.0) throw std::invalid_argument("kahler_margin: k must be nonnegative");
    if (!spec.model.has_complex_structure())
        throw std::invalid_argument("kahler_margin: model has no complex structure");
    const Mat j = spec.model.complex_structure();
    const Mat jt = transpose(j);
    MarginReport rep;
    rep.inequality = "kahler";
    gate_matrix_hypotheses(rep, spec, fields, opts, true);
    reduce_slices(rep, traj, spec.model, opts,
                  [&](std::size_t n, const LogDerivatives& ld, double t) {
                      const Mat h = node_sym(ld.hess, n);
                      const Mat m = node_sym(fields.symx, n);
                      const Mat p = sym_part(h + matmul(jt, matmul(h, j)) +
                                             0.25 * (m + matmul(jt, matmul(m, j))));
                      return sym_eigs(p).min() + kcoth(k, t);
                  });
    return rep;
}

MarginReport scalar_margin(const Trajectory& traj, const DriftSpec& spec,
                           const DerivedFields& fields, const HarnackParams& params,
                           const MarginOptions& opts) {
    check_run_inputs(traj, spec);
    if (params.n != spec.model.dim())
        throw std::invalid_argument("scalar_margin: params dimension does not match the model");
    if (params.chi == 0.0)
        throw std::invalid_argument("scalar_margin: chi = 0; use li_yau_margin");
    const int d = spec.model.dim();
    MarginReport rep;
    rep.inequality = "scalar";
    rep.metadata =
        "statement form; the proof's comparison function is the affine transform "
        "g = -2 * statement_lhs + c(t)";
    reduce_slices(rep, traj, spec.model, opts,
                  [&, last_t = -1.0, co = Abc{}](std::size_t n, const LogDerivatives& ld,
                                                 double t) mutable {
                      if (t != last_t) {
                          co = abc_parameters(params, t);
                          last_t = t;
                      }
                      double grad2 = 0.0;
                      for (int a = 0; a < d; ++a) {
                          const double g = ld.grad.at(n, a) + 0.5 * spec.x.at(n, a);
                          grad2 += g * g;
                      }
                      return co.a * (ld.lap.v[n] + 0.5 * fields.divx.v[n]) - co.b * grad2 +
                             0.5 * co.b * fields.w.v[n] + 0.5 * co.c;
                  });
    return rep;
}

MarginReport li_xu_margin(const Trajectory& traj, const DriftSpec& spec,
                          const DerivedFields& fields, double big_k, const MarginOptions& opts) {
    if (!(big_k > 0.0)) throw std::invalid_argument("li_xu_margin: K must be positive");
    MarginReport rep =
        scalar_margin(traj, spec, fields, li_xu_params(big_k, spec.model.dim()), opts);
    rep.inequality = "li_xu";
    return rep;
}

MarginReport li_yau_margin(const Trajectory& traj, const DriftSpec& spec,
                           const MarginOptions& opts) {
    check_run_inputs(traj, spec);
    if (spec.x.max_norm() > 0.0 || spec.u.max_abs() > 0.0)
        throw std::invalid_argument("li_yau_margin: drift present");
    const double half_n = 0.5 * spec.model.dim();
    MarginReport rep;
    rep.inequality = "li_yau";
    reduce_slices(rep, traj, spec.model, opts,
                  [&](std::size_t n, const LogDerivatives& ld, double t) {
                      return ld.lap.v[n] + half_n / t;
                  });
    return rep;
}

double gradient_case_reduction_check(const DriftSpec& spec, const DerivedFields& fields) {
    if (fields.a.max_abs() > 1e-8)
        throw std::invalid_argument("gradient reduction: drift is not a gradient field");
    if (spec.model.flat() == nullptr)
        throw std::invalid_argument("gradient reduction: needs a flat model");
    const Grid& g = spec.model.grid();

    // recover f with grad f = X: fhat = -i sum_a xi_a Xhat_a / |xi|^2
    std::vector<spectral::cplx> fhat(g.node_count(), spectral::cplx(0.0, 0.0));
    for (int a = 0; a < g.dim(); ++a) {
        const std::vector<spectral::cplx> xa = spectral::forward(component(spec.x, a));
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            const auto idx = g.unflatten(node);
            const double xi = spectral::wavenumber(g, a, idx[a]);
            fhat[node] += spectral::cplx(0.0, -xi) * xa[node];
        }
    }
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const auto idx = g.unflatten(node);
        double xi2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double xi = spectral::wavenumber(g, a, idx[a]);
            xi2 += xi * xi;
        }
        fhat[node] = xi2 > 0.0 ? fhat[node] / xi2 : spectral::cplx(0.0, 0.0);
    }
    const ScalarGridField f = spectral::to_real_field(fhat, g);
    const MatrixGridField hess_f = covariant_hessian(spec.model, f);

    double worst = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n)
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j)
                worst = std::max(worst, std::abs(0.25 * fields.symx.at(n, i, j) -
                                                 0.5 * hess_f.at(n, i, j)));
    return worst;
}

}  // namespace harnack
