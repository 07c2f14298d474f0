#include "harnacklab/smallmat.hpp"

#include <algorithm>
#include <cmath>

namespace harnack {

SymSpectrum sym_eigs(const Mat& m, double asym_tol) {
    const int n = m.n;
    if (n < 1 || n > 3) throw std::invalid_argument("sym_eigs: dimension must be 1..3");
    double scale = max_abs(m);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > asym_tol * std::max(1.0, scale))
                throw std::invalid_argument("sym_eigs: input is not symmetric");

    Mat a = sym_part(m);
    const double stop = 1e-14 * std::max(1.0, scale);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = a(p, k) = akp - s * (akq + tau * akp);
                    a(k, q) = a(q, k) = akq + s * (akp - tau * akq);
                }
            }
        }
    }

    SymSpectrum out;
    out.n = n;
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.begin() + n);
    return out;
}

}  // namespace harnack
