#include "harnacklab/manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace harnack {

namespace {

constexpr double pole_guard = 1e-3;

void require_off_pole(double theta) {
    if (theta < pole_guard || theta > std::numbers::pi - pole_guard)
        throw std::domain_error("sphere chart: evaluation too close to a pole");
}

double minimal_image(double d, double period) { return d - period * std::round(d / period); }

// constant-curvature tensor K (d_ik d_jl - d_il d_jk) plus its Ricci trace
void fill_constant_curvature(CurvatureData& c, double k) {
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j)
            for (int kk = 0; kk < c.n; ++kk)
                for (int l = 0; l < c.n; ++l)
                    c.rm[i][j][kk][l] =
                        k * ((i == kk && j == l ? 1.0 : 0.0) - (i == l && j == kk ? 1.0 : 0.0));
    c.rc = Mat::zero(c.n);
    for (int j = 0; j < c.n; ++j)
        for (int l = 0; l < c.n; ++l) {
            double s = 0.0;
            for (int i = 0; i < c.n; ++i) s += c.rm[i][j][i][l];
            c.rc(j, l) = s;
        }
}

}  // namespace

ManifoldModel ManifoldModel::flat_torus(const Grid& grid) {
    return ManifoldModel(FlatTorus{grid});
}

ManifoldModel ManifoldModel::conformal_torus(const ScalarGridField& phi) {
    if (phi.grid.dim() != 2)
        throw std::invalid_argument("conformal torus: phi must live on a 2-torus grid");
    if (!phi.all_finite()) throw std::invalid_argument("conformal torus: phi has non-finite values");

    ConformalTorus ct;
    ct.grid = phi.grid;
    ct.phi = phi;
    ct.phi_spec = spectral::forward(phi);
    ct.dphi = VectorGridField(ct.grid);
    for (int a = 0; a < 2; ++a) {
        auto spec = ct.phi_spec;
        spectral::apply_derivative(spec, ct.grid, a, 1);
        ct.dphi_spec[a] = spec;
        set_component(ct.dphi, a, spectral::to_real_field(spec, ct.grid));
    }
    ScalarGridField lap = spectral::derivative(phi, 0, 2);
    ScalarGridField lap_y = spectral::derivative(phi, 1, 2);
    ct.gauss = ScalarGridField(ct.grid);
    for (std::size_t n = 0; n < ct.grid.node_count(); ++n)
        ct.gauss.v[n] = -std::exp(-2.0 * phi.v[n]) * (lap.v[n] + lap_y.v[n]);
    ct.gauss_spec = spectral::forward(ct.gauss);
    for (int a = 0; a < 2; ++a) {
        auto spec = ct.gauss_spec;
        spectral::apply_derivative(spec, ct.grid, a, 1);
        ct.dgauss_spec[a] = spec;
    }
    return ManifoldModel(std::move(ct));
}

ManifoldModel ManifoldModel::sphere(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
    return ManifoldModel(Sphere2{radius});
}

int ManifoldModel::dim() const {
    if (const auto* f = flat()) return f->grid.dim();
    return 2;
}

bool ManifoldModel::is_grid_model() const { return sphere_model() == nullptr; }

const Grid& ManifoldModel::grid() const {
    if (const auto* f = flat()) return f->grid;
    if (const auto* c = conformal()) return c->grid;
    throw std::invalid_argument("sphere model has no grid");
}

bool ManifoldModel::has_complex_structure() const { return dim() == 2; }

Mat ManifoldModel::complex_structure() const {
    if (!has_complex_structure())
        throw std::invalid_argument("model has no complex structure");
    Mat j = Mat::zero(2);
    j(0, 1) = 1.0;
    j(1, 0) = -1.0;
    return j;
}

Vec CurvatureData::apply(const Vec& u, const Vec& v, const Vec& w) const {
    Vec r = vec_zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) r[l] += u[i] * v[j] * w[k] * rm[i][j][k][l];
    return r;
}

double CurvatureData::sectional(const Vec& u, const Vec& v) const {
    const double denom = dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v);
    if (denom < 1e-12) throw std::invalid_argument("sectional: degenerate plane");
    return dot(apply(u, v, u), v) / denom;
}

double CurvatureData::bisectional(const Vec& u, const Vec& v) const {
    if (!has_j) throw std::invalid_argument("bisectional: model has no complex structure");
    const double denom = dot(u, u) * dot(v, v);
    if (denom < 1e-12) throw std::invalid_argument("bisectional: zero vector");
    return dot(apply(u, matvec(j, u), v), matvec(j, v)) / denom;
}

double CurvatureData::symmetry_residual() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    worst = std::max(worst, std::fabs(rm[i][j][k][l] + rm[j][i][k][l]));
                    worst = std::max(worst, std::fabs(rm[i][j][k][l] + rm[i][j][l][k]));
                    worst = std::max(worst, std::fabs(rm[i][j][k][l] - rm[k][l][i][j]));
                }
    return worst;
}

double CurvatureData::bianchi_residual() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    worst = std::max(
                        worst, std::fabs(rm[i][j][k][l] + rm[j][k][i][l] + rm[k][i][j][l]));
    return worst;
}

Christoffel christoffel(const ManifoldModel& model, const Point& p) {
    Christoffel g;
    if (const auto* f = model.flat()) {
        g.n = f->grid.dim();
        return g;
    }
    if (const auto* c = model.conformal()) {
        g.n = 2;
        const double p0 = spectral::eval(c->dphi_spec[0], c->grid, p);
        const double p1 = spectral::eval(c->dphi_spec[1], c->grid, p);
        const double dphi[2] = {p0, p1};
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    g.sym[k][i][j] = (k == i ? dphi[j] : 0.0) + (k == j ? dphi[i] : 0.0) -
                                     (i == j ? dphi[k] : 0.0);
        return g;
    }
    require_off_pole(p[0]);
    g.n = 2;
    const double theta = p[0];
    g.sym[0][1][1] = -std::sin(theta) * std::cos(theta);
    g.sym[1][0][1] = g.sym[1][1][0] = std::cos(theta) / std::sin(theta);
    return g;
}

CurvatureData curvature(const ManifoldModel& model, const Point& p) {
    CurvatureData c;
    c.point = p;
    c.n = model.dim();
    if (model.has_complex_structure()) {
        c.has_j = true;
        c.j = model.complex_structure();
    }
    if (model.flat()) {
        fill_constant_curvature(c, 0.0);
        return c;
    }
    if (const auto* ct = model.conformal()) {
        fill_constant_curvature(c, spectral::eval(ct->gauss_spec, ct->grid, p));
        return c;
    }
    require_off_pole(p[0]);
    const double r = model.sphere_model()->radius;
    fill_constant_curvature(c, 1.0 / (r * r));
    return c;
}

Mat connection_form(const ManifoldModel& model, const Point& p, int m) {
    if (model.flat()) return Mat::zero(model.dim());
    Mat w = Mat::zero(2);
    if (const auto* c = model.conformal()) {
        const double ephi = std::exp(-spectral::eval(c->phi_spec, c->grid, p));
        const double dphi[2] = {spectral::eval(c->dphi_spec[0], c->grid, p),
                                spectral::eval(c->dphi_spec[1], c->grid, p)};
        for (int b = 0; b < 2; ++b)
            for (int cc = 0; cc < 2; ++cc)
                w(b, cc) = ephi * ((m == cc ? dphi[b] : 0.0) - (m == b ? dphi[cc] : 0.0));
        return w;
    }
    require_off_pole(p[0]);
    if (m == 1) {
        const double cot_over_r = std::cos(p[0]) / std::sin(p[0]) / model.sphere_model()->radius;
        w(0, 1) = cot_over_r;
        w(1, 0) = -cot_over_r;
    }
    return w;
}

NablaRm nabla_rm(const ManifoldModel& model, const Point& p) {
    NablaRm out;
    out.n = model.dim();
    if (model.flat()) return out;

    const CurvatureData base = curvature(model, p);
    // frame derivative of the scalar coefficient in Rm = K (d_ik d_jl - d_il d_jk)
    double dk_frame[3] = {0.0, 0.0, 0.0};
    if (const auto* ct = model.conformal()) {
        const double ephi = std::exp(-spectral::eval(ct->phi_spec, ct->grid, p));
        for (int m = 0; m < 2; ++m)
            dk_frame[m] = ephi * spectral::eval(ct->dgauss_spec[m], ct->grid, p);
    }
    for (int m = 0; m < out.n; ++m) {
        const Mat w = connection_form(model, p, m);
        for (int i = 0; i < out.n; ++i)
            for (int j = 0; j < out.n; ++j)
                for (int k = 0; k < out.n; ++k)
                    for (int l = 0; l < out.n; ++l) {
                        double corr = 0.0;
                        for (int a = 0; a < out.n; ++a)
                            corr += w(i, a) * base.rm[a][j][k][l] + w(j, a) * base.rm[i][a][k][l] +
                                    w(k, a) * base.rm[i][j][a][l] + w(l, a) * base.rm[i][j][k][a];
                        const double de = dk_frame[m] * ((i == k && j == l ? 1.0 : 0.0) -
                                                         (i == l && j == k ? 1.0 : 0.0));
                        out.c[m][i][j][k][l] = de - corr;
                    }
    }
    return out;
}

Vec frame_velocity(const ManifoldModel& model, const Point& p, const Point& chart_velocity) {
    Vec u = vec_zero(model.dim());
    if (model.flat()) {
        for (int a = 0; a < u.n; ++a) u[a] = chart_velocity[a];
        return u;
    }
    if (const auto* c = model.conformal()) {
        const double ephi = std::exp(spectral::eval(c->phi_spec, c->grid, p));
        for (int a = 0; a < 2; ++a) u[a] = ephi * chart_velocity[a];
        return u;
    }
    require_off_pole(p[0]);
    const double r = model.sphere_model()->radius;
    u[0] = r * chart_velocity[0];
    u[1] = r * std::sin(p[0]) * chart_velocity[1];
    return u;
}

std::vector<Vec> parallel_transport(const ManifoldModel& model, const std::vector<Point>& curve,
                                    const Vec& v0) {
    if (curve.size() < 2) throw std::invalid_argument("parallel transport: need at least 2 samples");
    const int n = model.dim();

    std::vector<Vec> out;
    out.reserve(curve.size());
    Vec v = v0;
    v.n = n;
    out.push_back(v);

    auto rhs = [&](const Point& x, const Point& dx, const Vec& state) {
        const Vec u = frame_velocity(model, x, dx);
        Mat w = Mat::zero(n);
        for (int m = 0; m < n; ++m) {
            const Mat wm = connection_form(model, x, m);
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) w(b, c) += u[m] * wm(b, c);
        }
        Vec dv = vecmat(state, w);
        for (int c = 0; c < n; ++c) dv[c] = -dv[c];
        return dv;
    };

    for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
        const Point a = curve[s];
        Point delta{0.0, 0.0, 0.0};
        if (model.is_grid_model()) {
            const Grid& g = model.grid();
            for (int ax = 0; ax < n; ++ax) {
                delta[ax] = minimal_image(curve[s + 1][ax] - a[ax], g.period(ax));
                if (std::fabs(delta[ax]) > 2.0 * g.spacing(ax))
                    throw std::invalid_argument("parallel transport: curve samples too far apart");
            }
        } else {
            delta[0] = curve[s + 1][0] - a[0];
            delta[1] = minimal_image(curve[s + 1][1] - a[1], 2.0 * std::numbers::pi);
            if (std::fabs(delta[0]) + std::fabs(delta[1]) > 0.5)
                throw std::invalid_argument("parallel transport: curve samples too far apart");
        }
        auto at = [&](double t) {
            return Point{a[0] + t * delta[0], a[1] + t * delta[1], a[2] + t * delta[2]};
        };
        const Vec k1 = rhs(at(0.0), delta, v);
        Vec vt = v;
        for (int c = 0; c < n; ++c) vt[c] = v[c] + 0.5 * k1[c];
        const Vec k2 = rhs(at(0.5), delta, vt);
        for (int c = 0; c < n; ++c) vt[c] = v[c] + 0.5 * k2[c];
        const Vec k3 = rhs(at(0.5), delta, vt);
        for (int c = 0; c < n; ++c) vt[c] = v[c] + k3[c];
        const Vec k4 = rhs(at(1.0), delta, vt);
        for (int c = 0; c < n; ++c)
            v[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
        out.push_back(v);
    }
    return out;
}

double check_kahler_identities(const ManifoldModel& model, const std::vector<Point>& points,
                               const std::vector<Vec>& vectors) {
    if (!model.has_complex_structure())
        throw std::invalid_argument("kahler identities: model has no complex structure");
    if (vectors.size() < 3)
        throw std::invalid_argument("kahler identities: need at least 3 sample vectors");
    const Mat j = model.complex_structure();

    double worst = 0.0;
    for (const Point& p : points) {
        const CurvatureData c = curvature(model, p);
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            const Vec& u = vectors[i];
            const Vec& v = vectors[(i + 1) % vectors.size()];
            const Vec& w = vectors[(i + 2) % vectors.size()];
            const Vec plain = c.apply(u, v, w);
            const Vec rotated_in = c.apply(matvec(j, u), matvec(j, v), w);
            const Vec rotated_out = c.apply(u, v, matvec(j, w));
            const Vec j_plain = matvec(j, plain);
            for (int a = 0; a < c.n; ++a) {
                worst = std::max(worst, std::fabs(rotated_in[a] - plain[a]));
                worst = std::max(worst, std::fabs(rotated_out[a] - j_plain[a]));
            }
        }
    }
    return worst;
}

TraceLemmaResult lemma_rm_trace(const ManifoldModel& model, const Vec& x, const Point& p) {
    if (!model.has_complex_structure())
        throw std::invalid_argument("trace lemma: model has no complex structure");
    const Mat j = model.complex_structure();
    const Vec jx = matvec(j, x);
    const NablaRm d = nabla_rm(model, p);
    const int n = d.n;

    TraceLemmaResult r;
    r.lhs = vec_zero(n);
    r.rhs = vec_zero(n);
    for (int l = 0; l < n; ++l) {
        double lhs = 0.0, rhs = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double pair = x[a] * x[b] + jx[a] * jx[b];
                for (int i = 0; i < n; ++i) {
                    lhs += pair * d.c[a][b][i][i][l];
                    rhs += pair * d.c[i][i][a][b][l];
                }
            }
        r.lhs[l] = lhs;
        r.rhs[l] = rhs;
    }
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += (r.lhs[l] - r.rhs[l]) * (r.lhs[l] - r.rhs[l]);
    r.residual = std::sqrt(s);
    return r;
}

double nabla_j_residual(const ManifoldModel& model, const Point& p) {
    if (!model.has_complex_structure())
        throw std::invalid_argument("nabla J: model has no complex structure");
    const Mat j = model.complex_structure();
    const int n = model.dim();
    double worst = 0.0;
    for (int m = 0; m < n; ++m) {
        const Mat w = connection_form(model, p, m);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double val = 0.0;  // J is constant in the frame, so only corrections remain
                for (int c = 0; c < n; ++c) val -= w(a, c) * j(c, b) + w(b, c) * j(a, c);
                worst = std::max(worst, std::fabs(val));
            }
    }
    return worst;
}

}  // namespace harnack
