#include "harnacklab/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "harnacklab/covariant.hpp"
#include "harnacklab/spectral.hpp"

namespace harnack {

namespace {

using spectral::cplx;

// derivative at the middle of three samples with uneven spacing; exact on
// quadratics, so uniform interior spacing gives the usual centered stencil
double centered3(double fm, double f0, double fp, double hm, double hp) {
    return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hp * hm * (hp + hm));
}

struct Bracket {
    std::size_t j = 0;   // snapshot index on the left
    double theta = 0.0;  // 0 at times[j], 1 at times[j+1]
};

Bracket bracket(const std::vector<double>& times, double t, const char* who) {
    const double span = times.back() - times.front();
    const double slack = 1e-9 * std::max(span, 1.0);
    if (!(t >= times.front() - slack) || !(t <= times.back() + slack))
        throw std::invalid_argument(std::string(who) + ": time outside the trajectory range");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (j + 1 >= times.size()) j = times.size() - 2;
    double theta = (t - times[j]) / (times[j + 1] - times[j]);
    if (theta < 1e-9) theta = 0.0;
    if (theta > 1.0 - 1e-9) theta = 1.0;
    return {j, theta};
}

// spectra of every scalar component needed off-grid for one snapshot
struct SnapSpectra {
    std::vector<std::vector<cplx>> y;     // n components of Y
    std::vector<std::vector<cplx>> g;     // n*n entries of grad Y, row-major (a,b)
    std::vector<std::vector<cplx>> gz;    // n*n entries of grad Z, Z the Eq-of-Y right side
    std::vector<std::vector<cplx>> hdiv;  // n*n entries of hess(div Y)
};

SnapSpectra make_snap_spectra(const ManifoldModel& model, const VectorGridField& yf,
                              const DerivedFields& df) {
    const Grid& g = yf.grid;
    const int n = g.dim();
    const MatrixGridField gy = covariant_grad_vector(model, yf);
    const ScalarGridField divy = covariant_divergence(model, yf);
    const VectorGridField gdiv = covariant_gradient(model, divy);
    const MatrixGridField hd = covariant_hessian(model, divy);
    VectorGridField z(g);
    for (std::size_t nd = 0; nd < g.node_count(); ++nd)
        for (int b = 0; b < n; ++b) {
            double ay = 0.0;
            for (int a = 0; a < n; ++a) ay += yf.at(nd, a) * df.a.at(nd, a, b);
            z.at(nd, b) = gdiv.at(nd, b) - ay + df.gradw.at(nd, b);
        }
    const MatrixGridField gz = covariant_grad_vector(model, z);

    SnapSpectra s;
    for (int a = 0; a < n; ++a) s.y.push_back(spectral::forward(component(yf, a)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            s.g.push_back(spectral::forward(component(gy, a, b)));
            s.gz.push_back(spectral::forward(component(gz, a, b)));
            s.hdiv.push_back(spectral::forward(component(hd, a, b)));
        }
    return s;
}

// rolling two-snapshot cache; paths march forward in time, so each snapshot's
// spectra are built once
class SnapshotWindow {
public:
    SnapshotWindow(const YTrajectory& yt, const ManifoldModel& model, const DerivedFields& df)
        : yt_(yt), model_(model), df_(df) {}

    void ensure(std::size_t j) {
        if (have_ && j == lo_index_) return;
        if (have_ && j == lo_index_ + 1) {
            lo_ = std::move(hi_);
            hi_ = make_snap_spectra(model_, yt_.fields[j + 1], df_);
        } else {
            lo_ = make_snap_spectra(model_, yt_.fields[j], df_);
            hi_ = make_snap_spectra(model_, yt_.fields[j + 1], df_);
        }
        lo_index_ = j;
        have_ = true;
    }
    const SnapSpectra& lo() const { return lo_; }
    const SnapSpectra& hi() const { return hi_; }

private:
    const YTrajectory& yt_;
    const ManifoldModel& model_;
    const DerivedFields& df_;
    SnapSpectra lo_, hi_;
    std::size_t lo_index_ = 0;
    bool have_ = false;
};

double lerp_eval(const std::vector<cplx>& lo, const std::vector<cplx>& hi, double theta,
                 const Grid& g, const Point& x) {
    if (theta == 0.0) return spectral::eval(lo, g, x);
    if (theta == 1.0) return spectral::eval(hi, g, x);
    return (1.0 - theta) * spectral::eval(lo, g, x) + theta * spectral::eval(hi, g, x);
}

Mat lerp_eval_mat(const std::vector<std::vector<cplx>>& lo,
                  const std::vector<std::vector<cplx>>& hi, double theta, const Grid& g,
                  const Point& x) {
    const int n = g.dim();
    Mat m = Mat::zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = lerp_eval(lo[a * n + b], hi[a * n + b], theta, g, x);
    return m;
}

// frame derivative V -> S^Sk(V) V for the adapted-rotation ODE
Mat frame_rate(const Mat& v, const Mat& g) {
    return matmul(skew_part(matmul(v, matmul(g, transpose(v)))), v);
}

double gram_deviation(const Mat& v) {
    double worst = 0.0;
    for (int i = 0; i < v.n; ++i)
        for (int j = 0; j < v.n; ++j) {
            double dotij = 0.0;
            for (int c = 0; c < v.n; ++c) dotij += v(i, c) * v(j, c);
            worst = std::max(worst, std::abs(dotij - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

Mat orthonormalize_rows(const Mat& v) {
    Mat r = v;
    for (int i = 0; i < v.n; ++i) {
        for (int k = 0; k < i; ++k) {
            double proj = 0.0;
            for (int c = 0; c < v.n; ++c) proj += r(i, c) * r(k, c);
            for (int c = 0; c < v.n; ++c) r(i, c) -= proj * r(k, c);
        }
        double nrm = 0.0;
        for (int c = 0; c < v.n; ++c) nrm += r(i, c) * r(i, c);
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0))
            throw std::runtime_error("transport_adapted_frame: frame degenerated");
        for (int c = 0; c < v.n; ++c) r(i, c) /= nrm;
    }
    return r;
}

// midpoint of the shortest periodic segment from a to b, wrapped
Point torus_midpoint(const Grid& g, const Point& a, const Point& b) {
    Point r{0.0, 0.0, 0.0};
    for (int ax = 0; ax < g.dim(); ++ax) {
        const double L = g.period(ax);
        double d = b[ax] - a[ax];
        d -= L * std::round(d / L);
        r[ax] = a[ax] + 0.5 * d;
    }
    return g.wrap(r);
}

void check_traj_inputs(const Trajectory& traj, const DriftSpec& spec, const char* who,
                       std::size_t min_snapshots) {
    if (!spec.model.is_grid_model())
        throw std::invalid_argument(std::string(who) + ": grid models only");
    if (traj.times.size() < min_snapshots)
        throw std::invalid_argument(std::string(who) + ": not enough snapshots");
    if (traj.times.size() != traj.snapshots.size())
        throw std::invalid_argument(std::string(who) + ": trajectory arrays disagree");
    if (!(traj.grid == spec.model.grid()) || !(spec.x.grid == traj.grid))
        throw std::invalid_argument(std::string(who) + ": grids disagree");
}

}  // namespace

YTrajectory build_y(const Trajectory& traj, const DriftSpec& spec, LogRoute route) {
    check_traj_inputs(traj, spec, "build_y", 1);
    YTrajectory yt;
    yt.grid = traj.grid;
    yt.times = traj.times;
    const int n = traj.grid.dim();
    yt.fields.reserve(traj.snapshots.size());
    for (const ScalarGridField& snap : traj.snapshots) {
        if (!(snap.min() > 0.0))
            throw std::invalid_argument("build_y: nonpositive rho in snapshot");
        const LogDerivatives ld = log_derivatives(spec.model, snap, route);
        VectorGridField y(traj.grid);
        for (std::size_t nd = 0; nd < traj.grid.node_count(); ++nd)
            for (int a = 0; a < n; ++a)
                y.at(nd, a) = -2.0 * ld.grad.at(nd, a) - spec.x.at(nd, a);
        yt.fields.push_back(std::move(y));
    }
    return yt;
}

FlowPath integrate_flow(const YTrajectory& yt, const Point& x0, double t0, double t1, double dt) {
    if (yt.times.size() < 2 || yt.times.size() != yt.fields.size())
        throw std::invalid_argument("integrate_flow: need at least two snapshots of Y");
    if (!(t1 > t0)) throw std::invalid_argument("integrate_flow: need t0 < t1");
    bracket(yt.times, t0, "integrate_flow");
    bracket(yt.times, t1, "integrate_flow");
    if (dt <= 0.0) dt = yt.times[1] - yt.times[0];

    const Grid& g = yt.grid;
    const int n = g.dim();

    // rolling spectra of the Y components only
    std::vector<std::vector<cplx>> lo, hi;
    std::size_t lo_index = 0;
    bool have = false;
    auto spectra_of = [&](std::size_t j) {
        std::vector<std::vector<cplx>> s;
        for (int a = 0; a < n; ++a) s.push_back(spectral::forward(component(yt.fields[j], a)));
        return s;
    };
    auto y_at = [&](double t, const Point& x) {
        const Bracket br = bracket(yt.times, t, "integrate_flow");
        if (!have || br.j != lo_index) {
            if (have && br.j == lo_index + 1) {
                lo = std::move(hi);
                hi = spectra_of(br.j + 1);
            } else {
                lo = spectra_of(br.j);
                hi = spectra_of(br.j + 1);
            }
            lo_index = br.j;
            have = true;
        }
        Vec v = vec_zero(n);
        for (int a = 0; a < n; ++a) v[a] = lerp_eval(lo[a], hi[a], br.theta, g, x);
        return v;
    };
    auto shifted = [&](const Point& x, double s, const Vec& k) {
        Point r = x;
        for (int a = 0; a < n; ++a) r[a] += s * k[a];
        return r;
    };

    FlowPath path;
    Point x = g.wrap(x0);
    path.times.push_back(t0);
    path.points.push_back(x);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
    for (long k = 0; k < steps; ++k) {
        const double ta = t0 + static_cast<double>(k) * dt;
        const double tb = k + 1 == steps ? t1 : ta + dt;
        const double h = tb - ta;
        const Vec k1 = y_at(ta, x);
        const Vec k2 = y_at(ta + 0.5 * h, shifted(x, 0.5 * h, k1));
        const Vec k3 = y_at(ta + 0.5 * h, shifted(x, 0.5 * h, k2));
        const Vec k4 = y_at(tb, shifted(x, h, k3));
        for (int a = 0; a < n; ++a)
            x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        x = g.wrap(x);
        for (int a = 0; a < n; ++a)
            if (!std::isfinite(x[a]))
                throw SolverAbort("integrate_flow: non-finite position", tb);
        path.times.push_back(tb);
        path.points.push_back(x);
    }
    return path;
}

FrameTrajectory transport_adapted_frame(const FlowPath& path, const YTrajectory& yt,
                                        const DriftSpec& spec, const DerivedFields& fields) {
    if (!spec.model.flat())
        throw std::invalid_argument("transport_adapted_frame: flat tori only");
    if (path.times.empty() || path.times.size() != path.points.size())
        throw std::invalid_argument("transport_adapted_frame: empty or inconsistent path");
    if (yt.times.size() < 2 || yt.times.size() != yt.fields.size())
        throw std::invalid_argument("transport_adapted_frame: need at least two snapshots of Y");
    if (!(yt.grid == spec.model.grid()) || !(spec.x.grid == yt.grid))
        throw std::invalid_argument("transport_adapted_frame: grids disagree");
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k)
        if (!(path.times[k + 1] > path.times[k]))
            throw std::invalid_argument("transport_adapted_frame: path times must increase");

    const Grid& g = yt.grid;
    const int n = g.dim();

    // static drift spectra: grad A for D, hess W for F
    std::vector<std::vector<cplx>> sga, shw;
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ScalarGridField comp(g);
                for (std::size_t nd = 0; nd < g.node_count(); ++nd)
                    comp.v[nd] = fields.grada.at(nd, a, i, j);
                sga.push_back(spectral::forward(comp));
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) shw.push_back(spectral::forward(component(fields.hessw, i, j)));

    SnapshotWindow win(yt, spec.model, fields);
    auto g_at = [&](double t, const Point& x) {
        const Bracket br = bracket(yt.times, t, "transport_adapted_frame");
        win.ensure(br.j);
        return lerp_eval_mat(win.lo().g, win.hi().g, br.theta, g, x);
    };

    FrameTrajectory ft;
    ft.n = n;
    ft.samples.reserve(path.times.size());

    auto record = [&](double t, const Point& x, const Mat& v, double drift, double corr) {
        const Bracket br = bracket(yt.times, t, "transport_adapted_frame");
        win.ensure(br.j);
        const Mat gm = lerp_eval_mat(win.lo().g, win.hi().g, br.theta, g, x);
        const Mat gzm = lerp_eval_mat(win.lo().gz, win.hi().gz, br.theta, g, x);
        const Mat hdm = lerp_eval_mat(win.lo().hdiv, win.hi().hdiv, br.theta, g, x);
        Vec yv = vec_zero(n);
        for (int a = 0; a < n; ++a) yv[a] = lerp_eval(win.lo().y[a], win.hi().y[a], br.theta, g, x);

        FrameSample fs;
        fs.t = t;
        fs.x = x;
        fs.frame = v;
        // S_ij = <grad Y (v_i), v_j> entry by entry, then split so that the
        // symmetric and antisymmetric parts are exact and sum back to s exactly
        Mat raw = Mat::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) s += v(i, a) * gm(a, b) * v(j, b);
                raw(i, j) = s;
            }
        fs.s = Mat::zero(n);
        fs.s_sym = Mat::zero(n);
        fs.s_skew = Mat::zero(n);
        for (int i = 0; i < n; ++i) {
            fs.s_sym(i, i) = raw(i, i);
            fs.s(i, i) = raw(i, i);
            for (int j = i + 1; j < n; ++j) {
                const double u = 0.5 * (raw(i, j) + raw(j, i));
                const double w = 0.5 * (raw(i, j) - raw(j, i));
                fs.s_sym(i, j) = fs.s_sym(j, i) = u;
                fs.s_skew(i, j) = w;
                fs.s_skew(j, i) = -w;
                fs.s(i, j) = u + w;
                fs.s(j, i) = u - w;
            }
        }
        fs.b = matmul(v, matmul(gzm, transpose(v)));
        fs.r = Mat::zero(n);  // flat torus
        fs.e = matmul(v, matmul(hdm, transpose(v)));
        Mat hwm = Mat::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                hwm(i, j) = spectral::eval(shw[i * n + j], g, x);
        fs.f = matmul(v, matmul(hwm, transpose(v)));
        fs.d = Mat::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int p = 0; p < n; ++p) {
                        double row = 0.0;
                        for (int c = 0; c < n; ++c)
                            row += spectral::eval(sga[(a * n + p) * n + c], g, x) * yv[c];
                        acc += v(i, a) * v(j, p) * row;
                    }
                fs.d(i, j) = acc;
            }
        fs.ortho_drift = drift;
        fs.correction = corr;
        ft.samples.push_back(std::move(fs));
    };

    Mat v = Mat::identity(n);
    record(path.times[0], path.points[0], v, 0.0, 0.0);
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
        const double ta = path.times[k];
        const double tb = path.times[k + 1];
        const double h = tb - ta;
        const Point& xa = path.points[k];
        const Point& xb = path.points[k + 1];
        const Point xm = torus_midpoint(g, xa, xb);
        const Mat g1 = g_at(ta, xa);
        const Mat gm = g_at(ta + 0.5 * h, xm);
        const Mat g2 = g_at(tb, xb);
        const Mat a1 = frame_rate(v, g1);
        const Mat a2 = frame_rate(v + 0.5 * h * a1, gm);
        const Mat a3 = frame_rate(v + 0.5 * h * a2, gm);
        const Mat a4 = frame_rate(v + h * a3, g2);
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);

        const double drift = gram_deviation(v);
        double corr = 0.0;
        if (drift > 1e-10) {
            const Mat vn = orthonormalize_rows(v);
            corr = max_abs(vn - v);
            v = vn;
        }
        record(tb, xb, v, drift, corr);
    }
    return ft;
}

BochnerResult bochner_residual(const FrameTrajectory& ft, int stride) {
    if (stride < 1) throw std::invalid_argument("bochner_residual: stride must be positive");
    const std::size_t need = 2 * static_cast<std::size_t>(stride) + 1;
    if (ft.samples.size() < need)
        throw std::invalid_argument("bochner_residual: needs at least three time samples");

    BochnerResult out;
    const int n = ft.n;
    for (std::size_t k = stride; k + stride < ft.samples.size(); ++k) {
        const FrameSample& sm = ft.samples[k - stride];
        const FrameSample& s0 = ft.samples[k];
        const FrameSample& sp = ft.samples[k + stride];
        const double hm = s0.t - sm.t;
        const double hp = sp.t - s0.t;
        Mat ds = Mat::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                ds(i, j) =
                    centered3(sm.s_sym(i, j), s0.s_sym(i, j), sp.s_sym(i, j), hm, hp);
        const Mat& sy = s0.s_sym;
        const Mat& sk = s0.s_skew;
        const Mat res = ds + matmul(sy, sy) + matmul(sy, sk) - matmul(sk, sy) +
                        matmul(sk, sk) - sym_part(s0.b) + s0.r;
        out.matrix.times.push_back(s0.t);
        out.matrix.values.push_back(frobenius(res));
        out.traced.times.push_back(s0.t);
        out.traced.values.push_back(std::abs(trace(res)));
    }
    out.matrix.max_value = *std::max_element(out.matrix.values.begin(), out.matrix.values.end());
    out.traced.max_value = *std::max_element(out.traced.values.begin(), out.traced.values.end());
    return out;
}

ResidualSeries eqy_residual(const Trajectory& traj, const DriftSpec& spec,
                            const DerivedFields& fields, LogRoute route) {
    check_traj_inputs(traj, spec, "eqy_residual", 3);
    const Grid& g = traj.grid;
    const int n = g.dim();

    std::vector<VectorGridField> y;
    std::vector<std::vector<unsigned char>> trust;
    y.reserve(traj.snapshots.size());
    for (const ScalarGridField& snap : traj.snapshots) {
        if (!(snap.min() > 0.0))
            throw std::invalid_argument("eqy_residual: nonpositive rho in snapshot");
        LogDerivatives ld = log_derivatives(spec.model, snap, route);
        VectorGridField yf(g);
        for (std::size_t nd = 0; nd < g.node_count(); ++nd)
            for (int a = 0; a < n; ++a)
                yf.at(nd, a) = -2.0 * ld.grad.at(nd, a) - spec.x.at(nd, a);
        y.push_back(std::move(yf));
        trust.push_back(std::move(ld.trust));
    }

    ResidualSeries out;
    for (std::size_t j = 1; j + 1 < traj.times.size(); ++j) {
        const double hm = traj.times[j] - traj.times[j - 1];
        const double hp = traj.times[j + 1] - traj.times[j];
        const MatrixGridField gy = covariant_grad_vector(spec.model, y[j]);
        const ScalarGridField divy = covariant_divergence(spec.model, y[j]);
        const VectorGridField gdiv = covariant_gradient(spec.model, divy);
        double worst = 0.0;
        for (std::size_t nd = 0; nd < g.node_count(); ++nd) {
            if (!trust[j - 1][nd] || !trust[j][nd] || !trust[j + 1][nd]) continue;
            double norm2 = 0.0;
            for (int b = 0; b < n; ++b) {
                const double ydot =
                    centered3(y[j - 1].at(nd, b), y[j].at(nd, b), y[j + 1].at(nd, b), hm, hp);
                double adv = 0.0;
                double ay = 0.0;
                for (int a = 0; a < n; ++a) {
                    adv += y[j].at(nd, a) * gy.at(nd, a, b);
                    ay += y[j].at(nd, a) * fields.a.at(nd, a, b);
                }
                const double r = ydot + adv - gdiv.at(nd, b) + ay - fields.gradw.at(nd, b);
                norm2 += r * r;
            }
            worst = std::max(worst, std::sqrt(norm2));
        }
        out.times.push_back(traj.times[j]);
        out.values.push_back(worst);
        out.max_value = std::max(out.max_value, worst);
    }
    return out;
}

ResidualSeries dlog_identity_residual(const Trajectory& traj, const DriftSpec& spec,
                                      LogRoute route) {
    check_traj_inputs(traj, spec, "dlog_identity_residual", 3);
    const Grid& g = traj.grid;
    const int n = g.dim();

    std::vector<LogDerivatives> ld;
    ld.reserve(traj.snapshots.size());
    for (const ScalarGridField& snap : traj.snapshots) {
        if (!(snap.min() > 0.0))
            throw std::invalid_argument("dlog_identity_residual: nonpositive rho in snapshot");
        ld.push_back(log_derivatives(spec.model, snap, route));
    }

    ResidualSeries out;
    for (std::size_t j = 1; j + 1 < traj.times.size(); ++j) {
        const double hm = traj.times[j] - traj.times[j - 1];
        const double hp = traj.times[j + 1] - traj.times[j];
        double worst = 0.0;
        for (std::size_t nd = 0; nd < g.node_count(); ++nd) {
            if (!ld[j - 1].trust[nd] || !ld[j].trust[nd] || !ld[j + 1].trust[nd]) continue;
            const double dlog = centered3(ld[j - 1].logrho.v[nd], ld[j].logrho.v[nd],
                                          ld[j + 1].logrho.v[nd], hm, hp);
            double shifted2 = 0.0;
            double x2 = 0.0;
            for (int a = 0; a < n; ++a) {
                const double xa = spec.x.at(nd, a);
                const double s = ld[j].grad.at(nd, a) + 0.5 * xa;
                shifted2 += s * s;
                x2 += xa * xa;
            }
            const double rhs = ld[j].lap.v[nd] + shifted2 - 0.25 * x2 + spec.u.v[nd];
            worst = std::max(worst, std::abs(dlog - rhs));
        }
        out.times.push_back(traj.times[j]);
        out.values.push_back(worst);
        out.max_value = std::max(out.max_value, worst);
    }
    return out;
}

}  // namespace harnack
