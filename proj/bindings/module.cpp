#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "harnacklab/margins.hpp"
#include "harnacklab/ode.hpp"
#include "harnacklab/scenario.hpp"
#include "harnacklab/solver.hpp"
#include "harnacklab/special.hpp"

namespace py = pybind11;
using namespace harnack;

namespace {

py::dict outcome_dict(const RunOutcome& out) {
    py::dict d;
    d["exit_code"] = out.exit_code;
    d["all_pass"] = out.all_pass;
    d["summary"] = out.summary;
    d["files"] = out.files;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "verification laboratory for differential Harnack inequalities";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const SolverAbort& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def("list_scenarios", &builtin_scenario_names,
          "names of the built-in scenario library");
    m.def(
        "scenario_description",
        [](const std::string& name) { return std::string(builtin_scenario_description(name)); },
        py::arg("name"), "one-line description of a built-in scenario");
    m.def("scenario_json", &builtin_scenario_json, py::arg("name"),
          "config document of a built-in scenario");
    m.def(
        "validate",
        [](const std::string& json_text) { return parse_scenario(json_text).id; },
        py::arg("config"),
        "parse and validate a config document; returns the scenario id, raises "
        "ValueError naming the offending field");

    m.def(
        "run",
        [](const std::string& json_text, const std::string& out_dir) {
            return outcome_dict(run_scenario(parse_scenario(json_text), out_dir));
        },
        py::arg("config"), py::arg("out_dir"),
        "execute the selected checks and write summary.json plus CSV tables; "
        "returns exit_code, all_pass, the summary document, and the file list");
    m.def(
        "sweep",
        [](const std::string& json_text, const std::string& parameter,
           const std::vector<double>& values, const std::string& out_dir) {
            SweepOutcome out = sweep_scenario(json_text, parameter, values, out_dir);
            py::dict d;
            d["exit_code"] = out.exit_code;
            d["csv"] = out.csv;
            return d;
        },
        py::arg("config"), py::arg("parameter"), py::arg("values"), py::arg("out_dir"),
        "re-run the config once per value of a dotted parameter; returns the "
        "consolidated CSV, one row per run");
    m.def(
        "hypotheses",
        [](const std::string& json_text, const std::string& out_dir) {
            return outcome_dict(run_hypotheses(parse_scenario(json_text), out_dir));
        },
        py::arg("config"), py::arg("out_dir"),
        "extract theorem constants and hypothesis flags without solving");
    m.def(
        "geometry_tests",
        [](const std::string& json_text, const std::string& out_dir) {
            return outcome_dict(run_geometry_tests(parse_scenario(json_text), out_dir));
        },
        py::arg("config"), py::arg("out_dir"),
        "curvature identity self-checks for the configured model");

    m.def("kcoth", &kcoth, py::arg("k"), py::arg("t"),
          "k coth(k t), continued as 1/t at k = 0");
    m.def(
        "abc_parameters",
        [](double big_k, double lam, double k1, double k2, int n, double t) {
            const HarnackParams p = make_params(0.0, big_k, lam, k1, k2, n);
            const Abc v = abc_parameters(p, t);
            py::dict d;
            d["a"] = v.a;
            d["b"] = v.b;
            d["c"] = v.c;
            d["chi"] = p.chi;
            return d;
        },
        py::arg("K"), py::arg("lam"), py::arg("k1"), py::arg("k2"), py::arg("n"),
        py::arg("t"),
        "scalar Harnack coefficients a, b, c and the rate chi at time t");
    m.def("riccati_comparison", &riccati_comparison, py::arg("k"), py::arg("t0"),
          py::arg("t1"), py::arg("dt") = 1e-4,
          "max deviation of the integrated Riccati equality case from k coth(k t)");
}
