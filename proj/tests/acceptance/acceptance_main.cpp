// Acceptance gate: one line per criterion, exit 0 only if every criterion
// passes. Tolerances are pinned here, next to the checks that use them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include "harnacklab/frames.hpp"
#include "harnacklab/margins.hpp"
#include "harnacklab/ode.hpp"
#include "harnacklab/scenario.hpp"
#include "harnacklab/special.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace harnack;
using nlohmann::json;

namespace {

int failures = 0;

void report(int num, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", num, detail.c_str());
    if (!pass) ++failures;
}

std::string out_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "harnacklab_acceptance" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

struct TimedRun {
    json summary;
    int exit_code = 0;
    double seconds = 0.0;
};

TimedRun run_builtin(const std::string& name) {
    const Scenario sc = parse_scenario(builtin_scenario_json(name));
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome ro = run_scenario(sc, out_dir(name));
    const auto t1 = std::chrono::steady_clock::now();
    TimedRun r;
    r.summary = json::parse(ro.summary);
    r.exit_code = ro.exit_code;
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

double margin_of(const json& s, const char* check) {
    return s.at("checks").at(check).at("global_min_margin").get<double>();
}

// integral form of the scalar bound: c(t) as the accumulated quadrature of
// (ctilde^2 / n + k1 + 2 (K + lambda) k2)(a + b), ctilde = c / (a + b)
double c_by_quadrature(const HarnackParams& p, double t) {
    const double load = p.k1 + 2.0 * (p.big_k + p.lambda) * p.k2;
    const auto f = [&p, load](double tau) {
        const Abc v = abc_parameters(p, tau);
        const double ab = v.a + v.b;
        const double ctilde = v.c / ab;
        return ctilde * ctilde * ab / p.n + load * ab;
    };
    return oracle::adaptive_simpson(f, 1e-10, t, 1e-10);
}

double rel_diff(const ScalarGridField& a, const ScalarGridField& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a.v.size(); ++n) {
        diff = std::max(diff, std::abs(a.v[n] - b.v[n]));
        scale = std::max(scale, std::abs(a.v[n]));
    }
    return diff / std::max(scale, 1e-300);
}

}  // namespace

// criteria 1 and 2 share the hamilton_gaussian run
void criteria_1_2() {
    const TimedRun r = run_builtin("hamilton_gaussian");
    const double band_lo = -1e-3, band_hi = 1e-2, budget_s = 60.0;

    char buf[256];
    const bool ok_run = r.exit_code == 0 && r.seconds <= budget_s;
    {
        const double m = margin_of(r.summary, "matrix");
        const bool pass = ok_run && m >= band_lo && m <= band_hi;
        std::snprintf(buf, sizeof buf,
                      "Hamilton equality case: min lambda_min(hess log rho) + 1/(2t) = %.3e "
                      "in [-1e-3, 1e-2], %.1f s <= 60 s",
                      m, r.seconds);
        report(1, pass, buf);
    }
    {
        const double m = margin_of(r.summary, "li_yau");
        const bool pass = ok_run && m >= band_lo && m <= band_hi;
        std::snprintf(buf, sizeof buf,
                      "Li-Yau equality case: min lap log rho + n/(2t) = %.3e in [-1e-3, 1e-2]",
                      m);
        report(2, pass, buf);
    }
}

void criterion_3() {
    const TimedRun r = run_builtin("cao_ni_gaussian");
    const double m = margin_of(r.summary, "kahler");
    const bool pass = r.exit_code == 0 && m >= -1e-3 && m <= 1e-2 && r.seconds <= 300.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Cao-Ni equality case: min lambda_min(H + J^T H J) + 1/t = %.3e "
                  "in [-1e-3, 1e-2], %.1f s <= 300 s",
                  m, r.seconds);
    report(3, pass, buf);
}

void criterion_4() {
    const TimedRun r = run_builtin("matrix_potential");
    const double m = margin_of(r.summary, "matrix");
    const double k = r.summary.at("constants").at("k").get<double>();
    const bool pass = r.exit_code == 0 && m >= -1e-3 && k > 0.0 &&
                      std::abs(k - std::sqrt(0.4)) < 1e-6;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "matrix Harnack with potential: best k = %.9f (nonzero), margin %.3e >= "
                  "-1e-3 on [0.05, 2]",
                  k, m);
    report(4, pass, buf);
}

void criterion_5() {
    const TimedRun r = run_builtin("scalar_nongradient");
    const double m = margin_of(r.summary, "scalar");
    const double chi = r.summary.at("constants").at("chi").get<double>();
    const bool auto_consts = r.summary.at("constants_source").at("K") == "auto" &&
                             r.summary.at("constants_source").at("k1") == "auto";
    const bool pass = r.exit_code == 0 && m >= -1e-3 && auto_consts &&
                      std::abs(chi - std::sqrt(0.5)) < 1e-9;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "scalar Harnack, non-gradient drift: auto constants (chi = %.9f), margin "
                  "%.3e >= -1e-3 on [0.05, 2]",
                  chi, m);
    report(5, pass, buf);
}

void criterion_6() {
    // frozen high-precision reference for the lambda = k1 = k2 = 0 reduction
    // at (K, t, n) = (0.7, 1.3, 2)
    const double ref_a = 1.67592922494177656353188582295;
    const double ref_b = -0.592458174737418090464350657847;
    const double ref_c = 3.62030091491848718894464015213;
    const HarnackParams lx = li_xu_params(0.7, 2);
    const Abc v = abc_parameters(lx, 1.3);
    const auto close = [](double got, double want) {
        return std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want));
    };
    bool pass = close(v.a, ref_a) && close(v.b, ref_b) && close(v.c, ref_c);
    double worst_int = 0.0, worst_ab = 0.0;

    // (K, lambda, k1, k2, n, t)
    const double pts[5][6] = {{0.7, 0.0, 0.0, 0.0, 2, 1.3},
                              {0.0, 0.5, 0.5, 0.0, 2, 1.0},
                              {0.3, 0.2, 0.4, 0.1, 3, 0.7},
                              {1.0, 0.25, 0.0, 0.5, 2, 2.0},
                              {0.05, 0.0, 1.2, 0.0, 1, 0.5}};
    for (const auto& q : pts) {
        const HarnackParams p =
            make_params(0.0, q[0], q[1], q[2], q[3], static_cast<int>(q[4]));
        const double t = q[5];
        const Abc w = abc_parameters(p, t);
        const double rel =
            std::abs(c_by_quadrature(p, t) - w.c) / std::max(1.0, std::abs(w.c));
        worst_int = std::max(worst_int, rel);
        const double s = std::sinh(p.chi * t);
        const double ab =
            std::abs(w.a + w.b - s * s) / std::max(1.0, s * s);
        worst_ab = std::max(worst_ab, ab);
    }
    pass = pass && worst_int <= 1e-8 && worst_ab <= 1e-12;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "parameter system: reduction matches reference to 1e-12, integral "
                  "identity rel err %.2e <= 1e-8, a+b = sinh^2 rel err %.2e <= 1e-12",
                  worst_int, worst_ab);
    report(6, pass, buf);
}

void criterion_7() {
    double worst_eq = 0.0;
    bool below = true;
    for (double k : {0.0, 0.5, 2.0}) {
        worst_eq = std::max(worst_eq, riccati_comparison(k, 0.1, 2.0));
        // a strict sub-solution of y' = y^2 - k^2 must stay below -k coth(kt)
        const OdeRhs rhs = [k](double, const std::vector<double>& y) {
            return std::vector<double>{y[0] * y[0] - k * k};
        };
        const OdePath path =
            rk4_integrate(rhs, 0.1, 2.0, {-kcoth(k, 0.1) - 0.2}, 1e-3);
        for (std::size_t i = 0; i < path.t.size(); ++i)
            below = below && path.y[i][0] < -kcoth(k, path.t[i]);
    }
    const bool pass = worst_eq <= 1e-9 && below;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Riccati comparison: equality case matches k coth(kt) to %.2e <= 1e-9 on "
                  "[0.1, 2] for k in {0, 0.5, 2}; sub-solutions stay below",
                  worst_eq);
    report(7, pass, buf);
}

void criterion_8() {
    // Bochner identity residual must shrink like dt^2 under dt halving:
    // strides 4/2/1 of one fine run give two halvings, each ratio in [2.5, 6]
    const Scenario sc = parse_scenario(builtin_scenario_json("frames_gaussian"));
    const ManifoldModel model = build_model(sc.model);
    const DriftSpec spec = build_drift(model, sc.drift);
    const DerivedFields fields = derive(spec);
    const ScalarGridField rho0 = build_initial(model.grid(), sc.initial);
    SolveOptions opts;
    opts.max_snapshots = sc.time.max_snapshots;
    const Trajectory traj =
        solve(spec, rho0, sc.time.t_start, sc.time.t_end, sc.time.dt, opts);
    const YTrajectory yt = build_y(traj, spec);
    Point x0{sc.frames.x0[0], 0.0, 0.0};
    const FlowPath path = integrate_flow(yt, x0, sc.frames.t_begin, sc.frames.t_end);
    const FrameTrajectory ft = transport_adapted_frame(path, yt, spec, fields);
    const double r4 = bochner_residual(ft, 4).matrix.max_value;
    const double r2 = bochner_residual(ft, 2).matrix.max_value;
    const double r1 = bochner_residual(ft, 1).matrix.max_value;
    const double q42 = r4 / r2, q21 = r2 / r1;
    const bool pass = q42 >= 2.5 && q42 <= 6.0 && q21 >= 2.5 && q21 <= 6.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Bochner residual halves like dt^2 on the heat-kernel run: ratios %.2f, "
                  "%.2f in [2.5, 6] (residuals %.2e -> %.2e -> %.2e)",
                  q42, q21, r4, r2, r1);
    report(8, pass, buf);
}

void criterion_9() {
    const TimedRun conf = run_builtin("conformal_geometry");
    const TimedRun sph = run_builtin("sphere_geometry");
    const json& cg = conf.summary.at("checks").at("geometry");
    const json& sg = sph.summary.at("checks").at("geometry");
    const double ck = cg.at("kahler_identity_max").get<double>();
    const double ct = cg.at("trace_lemma_max").get<double>();
    const double sk = sg.at("kahler_identity_max").get<double>();
    const double st = sg.at("trace_lemma_max").get<double>();
    const bool pass = conf.exit_code == 0 && sph.exit_code == 0 && ck <= 1e-6 &&
                      ct <= 1e-5 && sk <= 1e-8 && st <= 1e-8;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Kahler identities and trace lemma: conformal torus %.2e <= 1e-6 / %.2e "
                  "<= 1e-5, sphere %.2e / %.2e <= 1e-8",
                  ck, ct, sk, st);
    report(9, pass, buf);
}

void criterion_10() {
    const char* pde_builtins[] = {"hamilton_gaussian",    "cao_ni_gaussian",
                                  "matrix_potential",     "scalar_nongradient",
                                  "honesty_undersized_k", "frames_gaussian",
                                  "frames_drift",         "refinement_line"};
    double worst_const = 0.0, worst_semi = 0.0, worst_lin = 0.0;
    bool pass = true;
    for (const char* name : pde_builtins) {
        Scenario sc = parse_scenario(builtin_scenario_json(name));
        // downsize to the comparison resolution: m = 64 per axis, t <= 0.5;
        // heat seeds get t0 floored to 3 h^2 so the coarse grid resolves them
        const int dim = static_cast<int>(sc.model.points.size());
        sc.model.points.assign(dim, 64);
        double h = 0.0;
        for (double L : sc.model.period) h = std::max(h, L / 64.0);
        if (sc.model.period.empty()) h = 2.0 * std::numbers::pi / 64.0;
        if (sc.initial.type == "heat_kernel_seed") {
            sc.initial.t0 = std::max(sc.initial.t0, 3.0 * h * h);
            sc.time.t_start = sc.initial.t0;
        }
        sc.time.t_end = std::min(sc.time.t_end, 0.5);
        const double span = sc.time.t_end - sc.time.t_start;

        const ManifoldModel model = build_model(sc.model);
        const DriftSpec spec = build_drift(model, sc.drift);
        const ScalarGridField rho0 = build_initial(model.grid(), sc.initial);
        const Grid& g = model.grid();

        const Trajectory traj =
            solve(spec, rho0, sc.time.t_start, sc.time.t_end, sc.time.dt);
        const ScalarGridField fd =
            oracle::fd_heat_solve(spec.x, spec.u, rho0, span, sc.time.dt);
        double cap = 0.0, h2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            cap += 2.0 / (g.spacing(a) * g.spacing(a));
            h2 = std::max(h2, g.spacing(a) * g.spacing(a));
        }
        const double dt_fd = std::min(sc.time.dt, 0.5 / cap);
        const double c_measured = rel_diff(traj.snapshots.back(), fd) / (h2 + dt_fd);
        worst_const = std::max(worst_const, c_measured);

        // semigroup: 64 steps in one go vs 32 + 32 through the midpoint.
        // span/64 sits below the solver's advective stability bound for every
        // scenario here, so no internal dt reduction fires and the composed
        // run takes the same step sequence as the full run; the remaining
        // deviation is roundoff from the ulp-level dt difference of the halves.
        const double dts = span / 64.0;
        const double mid = sc.time.t_start + span / 2.0;
        const Trajectory full = solve(spec, rho0, sc.time.t_start, sc.time.t_end, dts);
        const Trajectory head = solve(spec, rho0, sc.time.t_start, mid, dts);
        const Trajectory tail =
            solve(spec, head.snapshots.back(), mid, sc.time.t_end, dts);
        worst_semi =
            std::max(worst_semi, rel_diff(full.snapshots.back(), tail.snapshots.back()));

        // linearity of the evolution in the initial data
        const ScalarGridField ones(g, 1.0);
        ScalarGridField combo = rho0;
        for (std::size_t n = 0; n < combo.v.size(); ++n) combo.v[n] += 0.5;
        const Trajectory tc = solve(spec, combo, sc.time.t_start, sc.time.t_end, dts);
        const Trajectory t1 = solve(spec, ones, sc.time.t_start, sc.time.t_end, dts);
        ScalarGridField recomposed = full.snapshots.back();
        for (std::size_t n = 0; n < recomposed.v.size(); ++n)
            recomposed.v[n] += 0.5 * t1.snapshots.back().v[n];
        worst_lin = std::max(worst_lin, rel_diff(tc.snapshots.back(), recomposed));
    }
    pass = pass && worst_const <= 10.0 && worst_semi <= 1e-12 && worst_lin <= 1e-10;
    char buf[300];
    std::snprintf(buf, sizeof buf,
                  "spectral vs finite-difference oracle on 8 scenarios at m = 64: error / "
                  "(h^2 + dt) = %.2f <= 10; semigroup dev %.1e <= 1e-12, linearity dev "
                  "%.1e <= 1e-10",
                  worst_const, worst_semi, worst_lin);
    report(10, pass, buf);
}

void criterion_11() {
    const TimedRun r = run_builtin("honesty_undersized_k");
    const double m = margin_of(r.summary, "matrix");
    const bool pass = r.exit_code == 1 && m < -0.05 &&
                      r.summary.at("checks").at("matrix").at("pass") == false;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "undersized user k is reported, not clamped: margin %.3f on record, "
                  "exit code %d == 1",
                  m, r.exit_code);
    report(11, pass, buf);
}

// a criterion that throws is a failed criterion, not a crashed gate
template <typename F>
void guarded(std::initializer_list<int> nums, F fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        for (int n : nums) report(n, false, std::string("exception: ") + e.what());
    }
}

int main() {
    guarded({1, 2}, criteria_1_2);
    guarded({3}, criterion_3);
    guarded({4}, criterion_4);
    guarded({5}, criterion_5);
    guarded({6}, criterion_6);
    guarded({7}, criterion_7);
    guarded({8}, criterion_8);
    guarded({9}, criterion_9);
    guarded({10}, criterion_10);
    guarded({11}, criterion_11);
    if (failures == 0)
        std::printf("acceptance: all 11 criteria pass\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
