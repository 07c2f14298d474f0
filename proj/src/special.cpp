#include "harnacklab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace harnack {

double kcoth(double k, double t) {
    if (t <= 0.0) throw std::invalid_argument("kcoth: t must be positive");
    k = std::fabs(k);  // k coth(k t) is even in k
    const double x = k * t;
    if (x < 1e-4) {
        // coth(x) = 1/x + x/3 - x^3/45 + O(x^5)
        const double k2 = k * k;
        return 1.0 / t + k2 * t / 3.0 - k2 * k2 * t * t * t / 45.0;
    }
    if (x > 19.0) {
        // coth(x) = 1 + 2 e^{-2x} + O(e^{-4x}); avoids sinh/cosh overflow
        return k * (1.0 + 2.0 * std::exp(-2.0 * x));
    }
    return k / std::tanh(x);
}

double sinhcosh_over_chi_minus_t(double chi, double t) {
    chi = std::fabs(chi);
    const double x = chi * t;
    if (x < 0.05) {
        // sinh(x)cosh(x)/chi - t = chi^2 t^3 (2/3 + (2/15)x^2 + (4/315)x^4 + (2/2835)x^6 + ...)
        const double x2 = x * x;
        return chi * chi * t * t * t *
               (2.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (4.0 / 315.0 + x2 * (2.0 / 2835.0))));
    }
    return std::sinh(x) * std::cosh(x) / chi - t;
}

}  // namespace harnack
