#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace harnack {

using Point = std::array<double, 3>;

// Uniform periodic grid on a flat box, 1 to 3 axes. Node (i0,i1,i2) sits at
// x_a = i_a * period_a / points_a; the last sample is one spacing short of the
// period, as usual for discrete Fourier work.
class Grid {
public:
    Grid(int dim, std::array<int, 3> points, std::array<double, 3> period);

    int dim() const { return dim_; }
    int points(int axis) const { return points_[axis]; }
    double period(int axis) const { return period_[axis]; }
    double spacing(int axis) const { return period_[axis] / points_[axis]; }
    double min_spacing() const;
    std::size_t node_count() const { return nodes_; }

    std::size_t flatten(int i0, int i1 = 0, int i2 = 0) const {
        return (static_cast<std::size_t>(i0) * points_[1] + i1) * points_[2] + i2;
    }
    std::array<int, 3> unflatten(std::size_t node) const {
        std::array<int, 3> idx{};
        idx[2] = static_cast<int>(node % points_[2]);
        node /= points_[2];
        idx[1] = static_cast<int>(node % points_[1]);
        idx[0] = static_cast<int>(node / points_[1]);
        return idx;
    }
    Point coordinate(std::size_t node) const {
        auto idx = unflatten(node);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) x[a] = idx[a] * spacing(a);
        return x;
    }
    // wraps x into [0, period) on every axis
    Point wrap(Point x) const;

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && points_ == other.points_ && period_ == other.period_;
    }

private:
    int dim_;
    std::array<int, 3> points_;
    std::array<double, 3> period_;
    std::size_t nodes_;
};

struct ScalarGridField {
    ScalarGridField() = default;
    explicit ScalarGridField(const Grid& g, double fill = 0.0)
        : grid(g), v(g.node_count(), fill) {}
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> v;

    double& at(std::size_t node) { return v[node]; }
    double at(std::size_t node) const { return v[node]; }
    double max() const;
    double min() const;
    double max_abs() const;
    bool all_finite() const;
};

// component-major per node: value(node, c) = v[node*dim + c]
struct VectorGridField {
    VectorGridField() = default;
    explicit VectorGridField(const Grid& g)
        : grid(g), v(g.node_count() * g.dim(), 0.0) {}
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> v;

    double& at(std::size_t node, int c) { return v[node * grid.dim() + c]; }
    double at(std::size_t node, int c) const { return v[node * grid.dim() + c]; }
    double max_norm() const;  // sup over nodes of euclidean norm
};

// row-major per node: value(node, r, c) = v[(node*dim + r)*dim + c]
struct MatrixGridField {
    MatrixGridField() = default;
    explicit MatrixGridField(const Grid& g)
        : grid(g), v(g.node_count() * g.dim() * g.dim(), 0.0) {}
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> v;

    double& at(std::size_t node, int r, int c) {
        const int d = grid.dim();
        return v[(node * d + r) * d + c];
    }
    double at(std::size_t node, int r, int c) const {
        const int d = grid.dim();
        return v[(node * d + r) * d + c];
    }
    double max_abs() const;
    double max_asymmetry() const;  // sup |M - M^T| entrywise
};

// rank-3 samples, layout value(node, a, i, j) = v[((node*dim + a)*dim + i)*dim + j];
// used for covariant derivatives of matrix fields, first slot = direction
struct Tensor3GridField {
    Tensor3GridField() = default;
    explicit Tensor3GridField(const Grid& g)
        : grid(g), v(g.node_count() * g.dim() * g.dim() * g.dim(), 0.0) {}
    Grid grid{1, {8, 1, 1}, {1.0, 1.0, 1.0}};
    std::vector<double> v;

    double& at(std::size_t node, int a, int i, int j) {
        const int d = grid.dim();
        return v[((node * d + a) * d + i) * d + j];
    }
    double at(std::size_t node, int a, int i, int j) const {
        const int d = grid.dim();
        return v[((node * d + a) * d + i) * d + j];
    }
    double max_abs() const;
    double max_frobenius() const;  // sup over nodes of sqrt(sum of squares)
};

// extract / insert one component as a scalar field
ScalarGridField component(const VectorGridField& f, int c);
ScalarGridField component(const MatrixGridField& f, int r, int c);
void set_component(VectorGridField& f, int c, const ScalarGridField& s);
void set_component(MatrixGridField& f, int r, int c, const ScalarGridField& s);

}  // namespace harnack
