#pragma once

#include <functional>
#include <vector>

namespace harnack {

struct OdePath {
    std::vector<double> t;
    std::vector<std::vector<double>> y;  // y[i] is the state at t[i]
};

using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

// Classical fixed-step RK4 from t0 to t1; dt is shrunk to divide the
// interval evenly. Records every step point including both endpoints.
OdePath rk4_integrate(const OdeRhs& rhs, double t0, double t1, std::vector<double> y0, double dt);

// Integrates the Riccati equation y' = y^2 - k^2 from y(t0) = -k coth(k t0)
// and returns the maximum deviation from -k coth(k t) over [t0, t1].
// The bound -(1/2) k coth(k t) in the matrix Harnack estimate is this
// solution halved, so agreement here checks the comparison function.
double riccati_comparison(double k, double t0, double t1, double dt = 1e-4);

}  // namespace harnack
