#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "harnacklab/covariant.hpp"
#include "harnacklab/manifold.hpp"
#include "harnacklab/spectral.hpp"
#include "oracles.hpp"

using namespace harnack;
namespace sp = harnack::spectral;
constexpr double pi = std::numbers::pi;

namespace {

Grid square_grid(int m) { return Grid(2, {m, m, 1}, {2.0 * pi, 2.0 * pi, 1.0}); }

ScalarGridField sample_phi(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarGridField phi(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        auto p = g.coordinate(n);
        phi.v[n] = f(p[0], p[1]);
    }
    return phi;
}

const std::vector<Point> torus_samples = {
    {0.7, 1.9, 0.0}, {2.1, 4.4, 0.0}, {3.9, 0.6, 0.0}, {5.5, 2.8, 0.0}};
const std::vector<Point> sphere_samples = {{0.9, 0.4, 0.0}, {1.7, 2.0, 0.0}, {2.6, 5.1, 0.0}};

Vec vec2(double a, double b) {
    Vec v = vec_zero(2);
    v[0] = a;
    v[1] = b;
    return v;
}

}  // namespace

TEST_CASE("model construction validates inputs") {
    CHECK_THROWS_AS(ManifoldModel::sphere(0.0), std::invalid_argument);
    Grid line(1, {16, 1, 1}, {2.0 * pi, 1.0, 1.0});
    ScalarGridField one_d(line);
    CHECK_THROWS_AS(ManifoldModel::conformal_torus(one_d), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldModel::sphere(1.0).grid(), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldModel::flat_torus(Grid(3, {8, 8, 8}, {1.0, 1.0, 1.0})).complex_structure(),
                    std::invalid_argument);
}

TEST_CASE("complex structure is an isometric square root of minus one") {
    auto model = ManifoldModel::flat_torus(square_grid(16));
    REQUIRE(model.has_complex_structure());
    Mat j = model.complex_structure();
    Mat j2 = matmul(j, j);
    CHECK(max_abs(j2 + Mat::identity(2)) <= 1e-15);
    Vec v = vec2(0.3, -1.2), w = vec2(0.9, 0.4);
    CHECK(dot(matvec(j, v), matvec(j, w)) == doctest::Approx(dot(v, w)).epsilon(1e-14));
}

TEST_CASE("christoffel symbols match the finite difference metric oracle") {
    auto flat = ManifoldModel::flat_torus(square_grid(16));
    for (const auto& p : torus_samples) {
        auto g = christoffel(flat, p);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) CHECK(g.sym[k][i][j] == 0.0);
    }

    Grid grid = square_grid(64);
    auto zero_phi = ManifoldModel::conformal_torus(ScalarGridField(grid));
    auto gz = christoffel(zero_phi, torus_samples[0]);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::fabs(gz.sym[k][i][j]) <= 1e-12);

    auto phi_fn = [](double x, double) { return 0.1 * std::sin(x); };
    auto model = ManifoldModel::conformal_torus(sample_phi(grid, phi_fn));
    oracle::MetricFn metric = [&](const Point& p) {
        Mat g = Mat::zero(2);
        g(0, 0) = g(1, 1) = std::exp(2.0 * phi_fn(p[0], p[1]));
        return g;
    };
    for (const auto& p : torus_samples) {
        auto g = christoffel(model, p);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(g.sym[k][i][j] ==
                          doctest::Approx(oracle::fd_christoffel(metric, p, k, i, j)).epsilon(1e-7));
    }

    auto round = ManifoldModel::sphere(1.3);
    oracle::MetricFn sphere_metric = [&](const Point& p) {
        Mat g = Mat::zero(2);
        g(0, 0) = 1.3 * 1.3;
        g(1, 1) = 1.3 * 1.3 * std::sin(p[0]) * std::sin(p[0]);
        return g;
    };
    for (const auto& p : sphere_samples) {
        auto g = christoffel(round, p);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(g.sym[k][i][j] ==
                          doctest::Approx(oracle::fd_christoffel(sphere_metric, p, k, i, j))
                              .epsilon(1e-7));
    }
    CHECK_THROWS_AS(christoffel(round, Point{1e-4, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("curvature matches oracle, closed forms, and tensor symmetries") {
    auto flat = ManifoldModel::flat_torus(square_grid(16));
    auto cf = curvature(flat, torus_samples[0]);
    CHECK(max_abs(cf.rc) == 0.0);
    CHECK(cf.symmetry_residual() == 0.0);

    const double r = 1.7;
    auto round = ManifoldModel::sphere(r);
    for (const auto& p : sphere_samples) {
        auto c = curvature(round, p);
        CHECK(c.sectional(vec2(1.0, 0.0), vec2(0.0, 1.0)) == doctest::Approx(1.0 / (r * r)));
        CHECK(c.sectional(vec2(0.6, 0.8), vec2(-0.5, 1.1)) == doctest::Approx(1.0 / (r * r)));
        CHECK(c.bisectional(vec2(1.0, 0.0), vec2(0.0, 1.0)) == doctest::Approx(1.0 / (r * r)));
        CHECK(c.rc(0, 0) == doctest::Approx(1.0 / (r * r)));
        CHECK(c.rc(1, 1) == doctest::Approx(1.0 / (r * r)));
        CHECK(c.symmetry_residual() <= 1e-15);
        CHECK(c.bianchi_residual() <= 1e-15);
    }
    oracle::MetricFn sphere_metric = [&](const Point& p) {
        Mat g = Mat::zero(2);
        g(0, 0) = r * r;
        g(1, 1) = r * r * std::sin(p[0]) * std::sin(p[0]);
        return g;
    };
    auto c = curvature(round, sphere_samples[1]);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int cc = 0; cc < 2; ++cc)
                for (int d = 0; d < 2; ++d) {
                    const double want =
                        oracle::fd_riemann_frame(sphere_metric, sphere_samples[1], a, b, cc, d);
                    CHECK(c.rm[a][b][cc][d] == doctest::Approx(want).epsilon(1e-4).scale(1.0));
                }

    Grid grid = square_grid(64);
    auto phi_fn = [](double x, double) { return 0.1 * std::sin(x); };
    auto model = ManifoldModel::conformal_torus(sample_phi(grid, phi_fn));
    oracle::MetricFn metric = [&](const Point& p) {
        Mat g = Mat::zero(2);
        g(0, 0) = g(1, 1) = std::exp(2.0 * phi_fn(p[0], p[1]));
        return g;
    };
    for (const auto& p : torus_samples) {
        auto cd = curvature(model, p);
        // Gauss curvature closed form: K = -e^{-2 phi} (flat laplacian of phi)
        const double want_k = 0.1 * std::exp(-0.2 * std::sin(p[0])) * std::sin(p[0]);
        CHECK(cd.rm[0][1][0][1] == doctest::Approx(want_k).epsilon(1e-9).scale(1.0));
        CHECK(cd.symmetry_residual() <= 1e-15);
        CHECK(cd.bianchi_residual() <= 1e-15);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int cc = 0; cc < 2; ++cc)
                    for (int d = 0; d < 2; ++d)
                        CHECK(cd.rm[a][b][cc][d] ==
                              doctest::Approx(oracle::fd_riemann_frame(metric, p, a, b, cc, d))
                                  .epsilon(1e-4)
                                  .scale(1.0));
    }
}

TEST_CASE("kahler identities hold on all complex models") {
    std::vector<Vec> vectors = {vec2(1.0, 0.0), vec2(0.0, 1.0), vec2(0.6, 0.8),
                                vec2(-0.8, 0.6), vec2(std::sqrt(0.5), std::sqrt(0.5))};

    auto flat = ManifoldModel::flat_torus(square_grid(16));
    CHECK(check_kahler_identities(flat, torus_samples, vectors) == 0.0);

    auto round = ManifoldModel::sphere(1.0);
    CHECK(check_kahler_identities(round, sphere_samples, vectors) <= 1e-8);

    Grid grid = square_grid(64);
    auto model = ManifoldModel::conformal_torus(
        sample_phi(grid, [](double x, double y) { return 0.2 * std::sin(x) * std::cos(y); }));
    CHECK(check_kahler_identities(model, torus_samples, vectors) <= 1e-6);

    auto flat3 = ManifoldModel::flat_torus(Grid(3, {8, 8, 8}, {1.0, 1.0, 1.0}));
    CHECK_THROWS_AS(check_kahler_identities(flat3, torus_samples, vectors), std::invalid_argument);
}

TEST_CASE("curvature trace identity holds and is nontrivial off constant curvature") {
    auto flat = ManifoldModel::flat_torus(square_grid(16));
    auto rf = lemma_rm_trace(flat, vec2(1.0, 0.0), torus_samples[0]);
    CHECK(rf.residual == 0.0);
    CHECK(norm(rf.lhs) == 0.0);

    auto round = ManifoldModel::sphere(1.0);
    auto rs = lemma_rm_trace(round, vec2(0.6, 0.8), sphere_samples[0]);
    CHECK(rs.residual <= 1e-12);
    CHECK(norm(rs.lhs) <= 1e-12);  // parallel curvature tensor

    Grid grid = square_grid(64);
    auto phi_fn = [](double x, double) { return 0.2 * std::sin(x); };
    auto model = ManifoldModel::conformal_torus(sample_phi(grid, phi_fn));
    const Point p{0.3, 1.1, 0.0};
    auto rc = lemma_rm_trace(model, vec2(1.0, 0.0), p);
    CHECK(rc.residual <= 1e-5);
    // both sides equal -grad K in the frame; K = 0.2 e^{-0.4 sin x} sin x
    const double s = std::sin(p[0]), c = std::cos(p[0]);
    const double dk = 0.2 * std::exp(-0.4 * s) * c * (1.0 - 0.4 * s);
    const double want = -std::exp(-0.2 * s) * dk;
    CHECK(rc.lhs[0] == doctest::Approx(want).epsilon(1e-8));
    CHECK(std::fabs(rc.lhs[0]) > 0.05);  // genuinely nonzero gradient
    CHECK(rc.rhs[0] == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("nabla rm vanishes on constant curvature and matches the conformal closed form") {
    auto round = ManifoldModel::sphere(1.4);
    auto d = nabla_rm(round, sphere_samples[1]);
    double worst = 0.0;
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        worst = std::max(worst, std::fabs(d.c[m][i][j][k][l]));
    CHECK(worst <= 1e-12);

    Grid grid = square_grid(64);
    auto model = ManifoldModel::conformal_torus(
        sample_phi(grid, [](double x, double) { return 0.2 * std::sin(x); }));
    const Point p{0.8, 2.2, 0.0};
    auto dc = nabla_rm(model, p);
    const double s = std::sin(p[0]), c = std::cos(p[0]);
    const double dk_frame = std::exp(-0.2 * s) * 0.2 * std::exp(-0.4 * s) * c * (1.0 - 0.4 * s);
    CHECK(dc.c[0][0][1][0][1] == doctest::Approx(dk_frame).epsilon(1e-9));
    CHECK(std::fabs(dc.c[1][0][1][0][1]) <= 1e-10);  // K independent of y
}

TEST_CASE("nabla J vanishes on every complex model") {
    auto flat = ManifoldModel::flat_torus(square_grid(16));
    CHECK(nabla_j_residual(flat, torus_samples[0]) <= 1e-15);
    auto round = ManifoldModel::sphere(2.0);
    for (const auto& p : sphere_samples) CHECK(nabla_j_residual(round, p) <= 1e-12);
    Grid grid = square_grid(64);
    auto model = ManifoldModel::conformal_torus(
        sample_phi(grid, [](double x, double y) { return 0.15 * std::sin(x) * std::sin(y); }));
    for (const auto& p : torus_samples) CHECK(nabla_j_residual(model, p) <= 1e-12);
}

TEST_CASE("parallel transport preserves norms and matches sphere holonomy") {
    auto flat = ManifoldModel::flat_torus(square_grid(32));
    std::vector<Point> line;
    for (int i = 0; i <= 40; ++i) line.push_back({0.1 * i, 0.05 * i, 0.0});
    auto moved = parallel_transport(flat, line, vec2(0.3, -0.7));
    CHECK(moved.back()[0] == doctest::Approx(0.3));
    CHECK(moved.back()[1] == doctest::Approx(-0.7));

    auto round = ManifoldModel::sphere(1.0);
    std::vector<Point> equator;
    for (int i = 0; i <= 64; ++i) equator.push_back({pi / 2.0, (pi / 2.0) * i / 64.0, 0.0});
    auto along = parallel_transport(round, equator, vec2(0.6, 0.8));
    CHECK(along.back()[0] == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(along.back()[1] == doctest::Approx(0.8).epsilon(1e-8));

    // full latitude loop at theta0: frame components rotate by -2 pi cos(theta0)
    const double theta0 = pi / 3.0;
    std::vector<Point> latitude;
    const int steps = 720;
    for (int i = 0; i <= steps; ++i) latitude.push_back({theta0, 2.0 * pi * i / steps, 0.0});
    auto looped = parallel_transport(round, latitude, vec2(1.0, 0.0));
    CHECK(looped.back()[0] == doctest::Approx(std::cos(2.0 * pi * std::cos(theta0))).epsilon(1e-8));
    CHECK(looped.back()[1] == doctest::Approx(-std::sin(2.0 * pi * std::cos(theta0))).epsilon(1e-8));
    for (const auto& v : looped) CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-10));

    Grid grid = square_grid(64);
    auto model = ManifoldModel::conformal_torus(
        sample_phi(grid, [](double x, double y) { return 0.2 * std::sin(x) * std::cos(y); }));
    std::vector<Point> wavy;
    for (int i = 0; i <= 200; ++i) wavy.push_back({0.05 * i, 0.5 * std::sin(0.05 * i), 0.0});
    auto curved = parallel_transport(model, wavy, vec2(1.0, 0.5));
    const double n0 = norm(curved.front());
    for (const auto& v : curved) CHECK(norm(v) == doctest::Approx(n0).epsilon(1e-10));

    std::vector<Point> jumpy = {{0.0, 0.0, 0.0}, {1.5, 0.0, 0.0}};
    CHECK_THROWS_AS(parallel_transport(model, jumpy, vec2(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("covariant operators reduce to flat formulas and conformal identities") {
    Grid grid = square_grid(64);
    auto flat = ManifoldModel::flat_torus(grid);

    ScalarGridField f(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) f.v[n] = std::sin(grid.coordinate(n)[0]);
    auto lap = covariant_laplacian(flat, f);
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        worst = std::max(worst, std::fabs(lap.v[n] + f.v[n]));
    CHECK(worst <= 5e-12);

    // gradient field: grad X symmetric, div X equals the laplacian of the potential
    ScalarGridField pot(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        auto p = grid.coordinate(n);
        pot.v[n] = std::sin(p[0]) * std::sin(p[1]);
    }
    auto x = covariant_gradient(flat, pot);
    auto gx = covariant_grad_vector(flat, x);
    CHECK(gx.max_asymmetry() <= 1e-10);
    auto div = covariant_divergence(flat, x);
    auto lap_pot = covariant_laplacian(flat, pot);
    worst = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        worst = std::max(worst, std::fabs(div.v[n] - lap_pot.v[n]));
    CHECK(worst <= 1e-10);

    auto phi_fn = [](double xx, double) { return 0.1 * std::sin(xx); };
    auto model = ManifoldModel::conformal_torus(sample_phi(grid, phi_fn));
    ScalarGridField cosy(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        cosy.v[n] = std::cos(grid.coordinate(n)[1]);
    auto clap = covariant_laplacian(model, cosy);
    worst = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const double want = std::exp(-2.0 * phi_fn(grid.coordinate(n)[0], 0.0)) * (-cosy.v[n]);
        worst = std::max(worst, std::fabs(clap.v[n] - want));
    }
    CHECK(worst <= 1e-8);

    // hessian equals the covariant gradient of the gradient field
    auto poly = oracle::random_trig(grid, 4, 41u);
    auto smooth = poly.sample(grid);
    auto hess = covariant_hessian(model, smooth);
    auto grad_of_grad = covariant_grad_vector(model, covariant_gradient(model, smooth));
    worst = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                worst = std::max(worst, std::fabs(hess.at(n, a, b) - grad_of_grad.at(n, a, b)));
    CHECK(worst <= 1e-8);
    CHECK(hess.max_asymmetry() == 0.0);

    // trace of grad X equals the divergence computed from the volume form
    VectorGridField xv(grid);
    auto poly2 = oracle::random_trig(grid, 4, 42u);
    auto poly3 = oracle::random_trig(grid, 4, 43u);
    set_component(xv, 0, poly2.sample(grid));
    set_component(xv, 1, poly3.sample(grid));
    auto gxc = covariant_grad_vector(model, xv);
    auto divc = covariant_divergence(model, xv);
    worst = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        worst = std::max(worst, std::fabs(gxc.at(n, 0, 0) + gxc.at(n, 1, 1) - divc.v[n]));
    CHECK(worst <= 1e-10);

    auto round = ManifoldModel::sphere(1.0);
    CHECK_THROWS_AS(covariant_laplacian(round, f), std::invalid_argument);
}
