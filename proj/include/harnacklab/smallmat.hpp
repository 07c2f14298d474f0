#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

// Dense linear algebra for the tiny matrices this project meets (n <= 3).
// Kept dependency free on purpose; the eigensolver is a cyclic Jacobi sweep.

namespace harnack {

struct Vec {
    int n = 0;
    std::array<double, 3> v{0.0, 0.0, 0.0};
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

struct Mat {
    int n = 0;
    std::array<std::array<double, 3>, 3> a{};
    static Mat zero(int n) {
        Mat m;
        m.n = n;
        return m;
    }
    static Mat identity(int n) {
        Mat m = zero(n);
        for (int i = 0; i < n; ++i) m.a[i][i] = 1.0;
        return m;
    }
    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }
};

inline Vec vec_zero(int n) {
    Vec v;
    v.n = n;
    return v;
}

inline Mat operator+(const Mat& x, const Mat& y) {
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}

inline Mat operator-(const Mat& x, const Mat& y) {
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
}

inline Mat operator*(double s, const Mat& x) {
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = s * x(i, j);
    return r;
}

inline Mat matmul(const Mat& x, const Mat& y) {
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            const double xik = x(i, k);
            for (int j = 0; j < x.n; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

inline Mat transpose(const Mat& x) {
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = x(j, i);
    return r;
}

inline Mat sym_part(const Mat& x) { return 0.5 * (x + transpose(x)); }
inline Mat skew_part(const Mat& x) { return 0.5 * (x - transpose(x)); }

inline double trace(const Mat& x) {
    double t = 0.0;
    for (int i = 0; i < x.n; ++i) t += x(i, i);
    return t;
}

inline double frobenius(const Mat& x) {
    double s = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) s += x(i, j) * x(i, j);
    return std::sqrt(s);
}

inline double max_abs(const Mat& x) {
    double m = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) m = std::max(m, std::abs(x(i, j)));
    return m;
}

inline Vec matvec(const Mat& x, const Vec& y) {
    Vec r = vec_zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r[i] += x(i, j) * y[j];
    return r;
}

// row-vector action w = v M, the natural pairing for (grad X)_ij = <nabla_i X, e_j>
inline Vec vecmat(const Vec& v, const Mat& m) {
    Vec r = vec_zero(m.n);
    for (int j = 0; j < m.n; ++j)
        for (int i = 0; i < m.n; ++i) r[j] += v[i] * m(i, j);
    return r;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (int i = 0; i < x.n; ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double det(const Mat& x) {
    switch (x.n) {
        case 1:
            return x(0, 0);
        case 2:
            return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
        case 3:
            return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
                   x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
                   x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
        default:
            throw std::invalid_argument("det: unsupported dimension");
    }
}

struct SymSpectrum {
    int n = 0;
    std::array<double, 3> eigenvalues{};  // ascending
    double min() const { return eigenvalues[0]; }
    double max() const { return eigenvalues[n - 1]; }
};

// Cyclic Jacobi rotations on a symmetric matrix. Converges fast at these
// sizes; the sweep cap is generous because each sweep is a handful of flops.
SymSpectrum sym_eigs(const Mat& m, double asym_tol = 1e-10);

}  // namespace harnack
