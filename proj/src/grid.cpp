#include "harnacklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harnack {

Grid::Grid(int dim, std::array<int, 3> points, std::array<double, 3> period)
    : dim_(dim), points_(points), period_(period) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
    for (int a = 0; a < dim; ++a) {
        if (points_[a] < 8) throw std::invalid_argument("grid: need at least 8 points per axis");
        if (points_[a] % 2 != 0) throw std::invalid_argument("grid: points per axis must be even");
        if (!(period_[a] > 0.0) || !std::isfinite(period_[a]))
            throw std::invalid_argument("grid: period must be positive and finite");
    }
    for (int a = dim; a < 3; ++a) {
        points_[a] = 1;
        period_[a] = 1.0;
    }
    nodes_ = 1;
    for (int a = 0; a < 3; ++a) nodes_ *= points_[a];
}

double Grid::min_spacing() const {
    double h = spacing(0);
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing(a));
    return h;
}

Point Grid::wrap(Point x) const {
    for (int a = 0; a < dim_; ++a) {
        const double L = period_[a];
        x[a] = std::fmod(x[a], L);
        if (x[a] < 0.0) x[a] += L;
        if (x[a] >= L) x[a] -= L;  // fmod can land exactly on L after the add
    }
    return x;
}

double ScalarGridField::max() const {
    return *std::max_element(v.begin(), v.end());
}

double ScalarGridField::min() const {
    return *std::min_element(v.begin(), v.end());
}

double ScalarGridField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarGridField::all_finite() const {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double VectorGridField::max_norm() const {
    const int d = grid.dim();
    double m = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += at(n, c) * at(n, c);
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double MatrixGridField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double MatrixGridField::max_asymmetry() const {
    const int d = grid.dim();
    double m = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n)
        for (int r = 0; r < d; ++r)
            for (int c = r + 1; c < d; ++c)
                m = std::max(m, std::abs(at(n, r, c) - at(n, c, r)));
    return m;
}

double Tensor3GridField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double Tensor3GridField::max_frobenius() const {
    const int d = grid.dim();
    const std::size_t block = static_cast<std::size_t>(d) * d * d;
    double m = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < block; ++k) {
            const double x = v[n * block + k];
            s += x * x;
        }
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

ScalarGridField component(const VectorGridField& f, int c) {
    ScalarGridField out(f.grid);
    for (std::size_t n = 0; n < f.grid.node_count(); ++n) out.v[n] = f.at(n, c);
    return out;
}

ScalarGridField component(const MatrixGridField& f, int r, int c) {
    ScalarGridField out(f.grid);
    for (std::size_t n = 0; n < f.grid.node_count(); ++n) out.v[n] = f.at(n, r, c);
    return out;
}

void set_component(VectorGridField& f, int c, const ScalarGridField& s) {
    for (std::size_t n = 0; n < f.grid.node_count(); ++n) f.at(n, c) = s.v[n];
}

void set_component(MatrixGridField& f, int r, int c, const ScalarGridField& s) {
    for (std::size_t n = 0; n < f.grid.node_count(); ++n) f.at(n, r, c) = s.v[n];
}

}  // namespace harnack
