#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harnacklab/drift.hpp"
#include "harnacklab/manifold.hpp"
#include "harnacklab/solver.hpp"

// Scenario-driven front end: one JSON document describes a model, a drift, an
// initial condition, a time window, and the checks to run; the pipeline
// executes the selected verifications and writes deterministic reports
// (summary.json plus CSV tables). Reports are byte-identical across repeated
// runs of the same config: keys are emitted in sorted order, numbers use
// shortest round-trip formatting, and nothing time- or host-dependent is
// recorded.
//
// Config schema (all physical parameters in natural units):
// {
//   "id": "name",                  // [a-z0-9_]+, used in report file names
//   "description": "...",
//   "model": {
//     "variant": "flat_torus" | "conformal_torus" | "sphere",
//     "points": m | [m, ...],      // grid nodes per axis (torus variants)
//     "period": L | [L, ...],      // default 2 pi per axis
//     "phi_amplitude": a,          // conformal: phi = a sin(x)
//     "radius": r                  // sphere
//   },
//   "drift": {
//     "x": {"form": "zero" | "constant" | "gradient_sine" | "cross_sine",
//           "amplitude": a, "axis": j, "components": [..]},
//          // gradient_sine: X = grad(a sin x_j); cross_sine: X = (a sin y, a sin x)
//     "u": {"form": "zero" | "constant" | "cosine",
//           "value": c, "amplitude": a, "axis": j}    // cosine: U = a cos x_j
//   },
//   "initial":                      // exactly one form, discriminated by "type"
//     {"type": "constant", "value": v} |
//     {"type": "single_mode", "base": b, "amplitude": a, "axis": j} |
//     {"type": "heat_kernel_seed", "t0": t, "center": [..]} |
//     {"type": "custom", "samples": [..]},
//   "time": {"t_start": a, "t_end": b, "dt": d, "stride": s, "max_snapshots": n},
//   "checks": ["matrix", "kahler", "scalar", "li_yau", "li_xu", "frames", "geometry"],
//   "constants": {"policy": "auto" | "user", "k":, "K":, "lambda":, "k1":, "k2":},
//          // auto extracts everything from the sampled fields; user-supplied
//          // k/K/k1/k2 require policy "user" and are used as given (never
//          // clamped to the extracted values). lambda is a free parameter of
//          // the scalar bound and may be set under either policy.
//   "tolerances": {"margin": 1e-3, "equality_band": 1e-2, "frames": 1e-3,
//                  "geometry": 0},  // geometry 0 = per-model defaults
//   "frames": {"x0": [..], "t_begin": a, "t_end": b, "path_dt": d},
//   "log_route": "auto" | "spectral" | "stencil",
//   "expect_equality": true,        // also require global min <= equality_band
//   "disc_estimate": "dt" | "grid" | "none",
//          // companion run with halved dt or halved grid; the difference of
//          // global minima is reported as the discretization-error estimate
//   "fields_output": "ends" | "none" | "all"
// }
//
// Reported extrema are grid-sampled: minima are taken over snapshot times and
// grid nodes, not continuously optimized.

namespace harnack {

// invalid configuration; field is the dotted path of the offending entry
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field_, const std::string& msg)
        : std::runtime_error(field_ + ": " + msg), field(field_) {}
    std::string field;
};

enum class Check { matrix, kahler, scalar, li_yau, li_xu, frames, geometry };

const char* check_name(Check c);

struct ModelConfig {
    std::string variant = "flat_torus";
    std::vector<int> points;
    std::vector<double> period;
    double phi_amplitude = 0.2;
    double radius = 1.0;
};

struct XFieldConfig {
    std::string form = "zero";
    double amplitude = 0.0;
    int axis = 0;
    std::vector<double> components;
};

struct UFieldConfig {
    std::string form = "zero";
    double value = 0.0;
    double amplitude = 0.0;
    int axis = 0;
};

struct DriftConfig {
    XFieldConfig x;
    UFieldConfig u;
};

struct InitialConfig {
    std::string type;
    double value = 1.0;       // constant
    double base = 2.0;        // single_mode
    double amplitude = 1.0;   // single_mode
    int axis = 0;             // single_mode
    double t0 = 0.01;         // heat_kernel_seed
    std::vector<double> center;
    std::vector<double> samples;  // custom
};

struct TimeConfig {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    int stride = 0;
    int max_snapshots = 200;
};

struct ConstantsConfig {
    bool user = false;
    std::optional<double> k, big_k, lambda, k1, k2;
};

struct ToleranceConfig {
    double margin = 1e-3;
    double equality_band = 1e-2;
    double frames = 1e-3;
    double geometry = 0.0;  // 0 = per-model defaults
};

struct FramesConfig {
    std::vector<double> x0;    // empty = seed center offset by a quarter period
    double t_begin = 0.0;      // 0/0 window = last two thirds of the run
    double t_end = 0.0;
    double path_dt = 0.0;      // 0 = snapshot spacing
};

struct Scenario {
    std::string id = "run";
    std::string description;
    ModelConfig model;
    DriftConfig drift;
    InitialConfig initial;
    bool has_initial = false;
    TimeConfig time;
    bool has_time = false;
    std::vector<Check> checks;
    ConstantsConfig constants;
    ToleranceConfig tol;
    FramesConfig frames;
    std::string log_route = "auto";
    bool expect_equality = false;
    std::string disc_estimate = "dt";
    std::string fields_output = "ends";
};

// parse + validate; throws ConfigError naming the offending field
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// built-in library: the acceptance runs by name
std::vector<std::string> builtin_scenario_names();
const char* builtin_scenario_description(const std::string& name);  // throws ConfigError
std::string builtin_scenario_json(const std::string& name);         // throws ConfigError

// construction helpers shared by the pipeline and the tests
ManifoldModel build_model(const ModelConfig& mc);
DriftSpec build_drift(const ManifoldModel& model, const DriftConfig& dc);
ScalarGridField build_initial(const Grid& grid, const InitialConfig& ic);

struct RunOutcome {
    int exit_code = 0;  // 0 all pass, 1 failed check, 3 solver abort
    bool all_pass = false;
    std::string summary;                  // summary.json content
    std::vector<std::string> files;       // paths written, summary.json first
};

// executes the selected checks and writes the report files into out_dir
// (created if missing); throws ConfigError for config-level inconsistencies
// detected after parsing (e.g. scalar constants on an incompatible drift)
RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir);

struct SweepOutcome {
    int exit_code = 0;
    std::string csv;  // consolidated table, one row per run
};

// re-runs the base config with config[parameter] = v for each value;
// per-run reports land in out_dir/<id>_<parameter>_<value>/
SweepOutcome sweep_scenario(const std::string& base_json_text, const std::string& parameter,
                            const std::vector<double>& values, const std::string& out_dir);

// constants extraction without a solve: hypothesis flags, extracted
// constants, and the grid-refinement aliasing gap; writes summary.json
RunOutcome run_hypotheses(const Scenario& sc, const std::string& out_dir);

// geometry self-checks only (model curvature identities); writes summary.json
RunOutcome run_geometry_tests(const Scenario& sc, const std::string& out_dir);

}  // namespace harnack
