#pragma once

namespace harnack {

// k * coth(k t), continuous in k with limit 1/t as k -> 0.
// Small-argument series and large-argument guard keep it stable over
// the full range of t > 0 used by the margin formulas.
double kcoth(double k, double t);

// sinh(x)*cosh(x)/x - t evaluated as q(chi, t) with x = chi t; series for
// small x so the chi -> 0 limit is exact.
double sinhcosh_over_chi_minus_t(double chi, double t);

}  // namespace harnack
