#include "harnacklab/ode.hpp"

#include <cmath>
#include <stdexcept>

#include "harnacklab/special.hpp"

namespace harnack {

OdePath rk4_integrate(const OdeRhs& rhs, double t0, double t1, std::vector<double> y0, double dt) {
    if (!(t1 > t0)) throw std::invalid_argument("rk4: need t1 > t0");
    if (!(dt > 0.0)) throw std::invalid_argument("rk4: need dt > 0");
    const std::size_t dim = y0.size();
    const long steps = std::max(1L, std::lround(std::ceil((t1 - t0) / dt)));
    const double h = (t1 - t0) / steps;

    OdePath path;
    path.t.reserve(steps + 1);
    path.y.reserve(steps + 1);
    path.t.push_back(t0);
    path.y.push_back(y0);

    std::vector<double> ytmp(dim), k1, k2, k3, k4;
    for (long s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        const std::vector<double>& y = path.y.back();

        k1 = rhs(t, y);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
        k2 = rhs(t + 0.5 * h, ytmp);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
        k3 = rhs(t + 0.5 * h, ytmp);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * k3[i];
        k4 = rhs(t + h, ytmp);

        std::vector<double> ynext(dim);
        for (std::size_t i = 0; i < dim; ++i)
            ynext[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        path.t.push_back(t0 + (s + 1) * h);
        path.y.push_back(std::move(ynext));
    }
    return path;
}

double riccati_comparison(double k, double t0, double t1, double dt) {
    if (!(t0 > 0.0)) throw std::invalid_argument("riccati_comparison: need t0 > 0");
    const double k2 = k * k;
    OdeRhs rhs = [k2](double, const std::vector<double>& y) {
        return std::vector<double>{y[0] * y[0] - k2};
    };
    OdePath path = rk4_integrate(rhs, t0, t1, {-kcoth(k, t0)}, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < path.t.size(); ++i) {
        const double dev = std::fabs(path.y[i][0] + kcoth(k, path.t[i]));
        if (dev > worst) worst = dev;
    }
    return worst;
}

}  // namespace harnack
