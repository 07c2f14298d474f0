#pragma once

#include "harnacklab/drift.hpp"
#include "harnacklab/smallmat.hpp"

// Smallest constants for which each Harnack theorem's hypotheses hold on the
// sampled model, plus residuals flagging hypothesis violations. Grid suprema
// stand in for manifold suprema; callers guard against aliasing by comparing
// constants across grid refinement (refinement_gap).

namespace harnack {

struct MatrixHypothesisFlags {
    double sectional_min = 0.0;          // most negative sectional curvature seen
    double ricci_parallel_residual = 0.0;  // sup |grad Rc|
    double a_parallel_residual = 0.0;      // sup |grad A|
    bool sectional_ok = true;              // sectional_min >= -1e-8
    bool ricci_parallel_ok = true;
    bool a_parallel_ok = true;
    bool all_ok() const { return sectional_ok && ricci_parallel_ok && a_parallel_ok; }
};

struct ScalarConstants {
    double big_k = 0.0;  // Ricci lower bound: Rc >= -K g
    double k1 = 0.0;     // sup of (1/(4 lambda))|div A|^2 - |A|^2/4 + Lap W
    double k2 = 0.0;     // max(0, -inf W)
};

struct HypothesisReport {
    double sectional_min = 0.0;
    double ricci_parallel_residual = 0.0;
    double a_parallel_residual = 0.0;
    double k = 0.0;
    double big_k = 0.0;
    double lambda = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double kahler_a_sym_residual = 0.0;
    double kahler_grada_residual = 0.0;
    double k_kahler = 0.0;
    bool has_kahler = false;
    MatrixHypothesisFlags flags;
};

// smallest k with (1/4)A^2 + Hess W <= k^2 I on the grid
double best_k(const DerivedFields& f);

// smallest k with (1/4)A^2 + (Hess W + J^T Hess W J)/2 <= k^2 I; throws
// without a complex structure
double best_k_kahler(const DerivedFields& f, const Mat& j);

// residuals of J^T A J = A and grad A(v,v) + grad A(Jv,Jv) = 0 over sampled
// unit vectors v and basis vectors w
struct KahlerAConditions {
    double sym_residual = 0.0;
    double grada_residual = 0.0;
};
KahlerAConditions kahler_a_conditions(const DerivedFields& f, const Mat& j);

// lambda > 0, or lambda = 0 with sup|div A| below tolerance (gradient case);
// otherwise throws std::invalid_argument
ScalarConstants scalar_constants(const DriftSpec& spec, const DerivedFields& f,
                                 double lambda);

MatrixHypothesisFlags matrix_hypothesis_flags(const ManifoldModel& model,
                                              const DerivedFields& f);

// everything above in one report; lambda feeds scalar_constants
HypothesisReport hypothesis_report(const DriftSpec& spec, const DerivedFields& f,
                                   double lambda);

// worst relative change of the extracted constants between two resolutions;
// used as the aliasing guard (accept when <= 1e-3)
double refinement_gap(const HypothesisReport& coarse, const HypothesisReport& fine);

// golden-section search for the lambda minimizing the scalar bound c(t_eval);
// convenience only, the theorems take lambda as given
double best_lambda(const DriftSpec& spec, const DerivedFields& f, double t_eval,
                   double lo, double hi);

}  // namespace harnack
