#pragma once

#include <array>
#include <variant>
#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/smallmat.hpp"
#include "harnacklab/spectral.hpp"

// Model geometries. Tensors are reported in orthonormal frames obtained by
// normalizing the coordinate frame (the metrics here are diagonal), with the
// orientation fixed so the complex structure is the standard rotation block.
// Curvature sign convention: Rm[i][j][k][l] = <Rm(e_i,e_j)e_k, e_l> with
// constant-curvature form K (d_ik d_jl - d_il d_jk), so sectional(u,v) =
// Rm(u,v,u,v) on orthonormal pairs and the round sphere has sectional +1/r^2.

namespace harnack {

struct FlatTorus {
    Grid grid;
};

// metric e^{2 phi} * (flat) on a 2-torus; spectra of phi, its gradient, the
// Gauss curvature and its gradient are cached for off-grid evaluation
struct ConformalTorus {
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    ScalarGridField phi;
    VectorGridField dphi;     // coordinate partials of phi on the grid
    ScalarGridField gauss;    // K = -e^{-2 phi} (flat laplacian of phi)
    std::vector<spectral::cplx> phi_spec;
    std::array<std::vector<spectral::cplx>, 2> dphi_spec;
    std::vector<spectral::cplx> gauss_spec;
    std::array<std::vector<spectral::cplx>, 2> dgauss_spec;
};

// round sphere in the (theta, phi) chart, theta in (0, pi); evaluation closer
// than 1e-3 radians to a pole is rejected as a chart singularity
struct Sphere2 {
    double radius = 1.0;
};

class ManifoldModel {
public:
    static ManifoldModel flat_torus(const Grid& grid);
    static ManifoldModel conformal_torus(const ScalarGridField& phi);
    static ManifoldModel sphere(double radius);

    int dim() const;
    bool is_grid_model() const;
    const Grid& grid() const;  // throws for the sphere

    bool has_complex_structure() const;
    Mat complex_structure() const;  // constant frame components, J e1 = e2

    const FlatTorus* flat() const { return std::get_if<FlatTorus>(&m_); }
    const ConformalTorus* conformal() const { return std::get_if<ConformalTorus>(&m_); }
    const Sphere2* sphere_model() const { return std::get_if<Sphere2>(&m_); }

private:
    explicit ManifoldModel(std::variant<FlatTorus, ConformalTorus, Sphere2> m) : m_(std::move(m)) {}
    std::variant<FlatTorus, ConformalTorus, Sphere2> m_;
};

// Christoffel symbols of the chart: sym[k][i][j] = Gamma^k_ij
struct Christoffel {
    int n = 0;
    std::array<std::array<std::array<double, 3>, 3>, 3> sym{};
};

struct CurvatureData {
    Point point{};
    int n = 0;
    std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> rm{};
    Mat rc;
    bool has_j = false;
    Mat j;

    Vec apply(const Vec& u, const Vec& v, const Vec& w) const;  // Rm(u,v)w
    double sectional(const Vec& u, const Vec& v) const;
    double bisectional(const Vec& u, const Vec& v) const;  // needs J
    double symmetry_residual() const;  // antisymmetry + pair exchange
    double bianchi_residual() const;   // first Bianchi, cyclic in slots 1-3
};

// frame components of the covariant derivative: c[m][i][j][k][l] = (nabla_{e_m} Rm)_{ijkl}
struct NablaRm {
    int n = 0;
    std::array<std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>, 3> c{};
};

struct TraceLemmaResult {
    Vec lhs, rhs;
    double residual = 0.0;
};

Christoffel christoffel(const ManifoldModel& model, const Point& p);
CurvatureData curvature(const ManifoldModel& model, const Point& p);
NablaRm nabla_rm(const ManifoldModel& model, const Point& p);

// connection form of the orthonormal frame: omega(b,c) = <nabla_{e_m} e_b, e_c>
Mat connection_form(const ManifoldModel& model, const Point& p, int m);
// frame components of a chart-velocity vector at p
Vec frame_velocity(const ManifoldModel& model, const Point& p, const Point& chart_velocity);

// parallel transport of v0 (frame components) along a sampled chart curve;
// one RK4 step per segment, piecewise-linear position
std::vector<Vec> parallel_transport(const ManifoldModel& model, const std::vector<Point>& curve,
                                    const Vec& v0);

// max residual over points and vector triples of
//   Rm(Ju,Jv)w - Rm(u,v)w   and   Rm(u,v)Jw - J Rm(u,v)w
double check_kahler_identities(const ManifoldModel& model, const std::vector<Point>& points,
                               const std::vector<Vec>& vectors);

// traced second-Bianchi consequence: contraction of nabla Rm over (X,X)+(JX,JX)
// in the first two slots equals the contraction over the last pair
TraceLemmaResult lemma_rm_trace(const ManifoldModel& model, const Vec& x, const Point& p);

// max frame component of nabla J at p (zero for a parallel complex structure)
double nabla_j_residual(const ManifoldModel& model, const Point& p);

}  // namespace harnack
