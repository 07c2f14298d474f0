// Command line front end: run verification scenarios, sweep a parameter,
// extract hypothesis constants, or exercise the geometry self-checks.
// Exit codes: 0 all selected checks pass, 1 a check failed, 2 bad
// configuration (the message names the offending field), 3 solver abort.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harnacklab/scenario.hpp"
#include "harnacklab/solver.hpp"
#include "json.hpp"

namespace {

using harnack::ConfigError;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string scenario_text(const std::string& name, const std::string& path) {
    if (!name.empty() && !path.empty())
        throw ConfigError("config", "give a built-in name or --config, not both");
    if (!name.empty()) return harnack::builtin_scenario_json(name);
    if (!path.empty()) return slurp(path);
    throw ConfigError("config", "need a built-in scenario name or --config PATH");
}

json load_cfg(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("json", e.what());
    }
}

// command line overrides touch the document before the normal validation
void apply_overrides(json& cfg, bool has_tol, double tol, int grid) {
    if (has_tol) cfg["tolerances"]["margin"] = tol;
    if (grid > 0) {
        json& m = cfg["model"];
        if (m.contains("points") && m["points"].is_array())
            for (auto& e : m["points"]) e = grid;
        else
            m["points"] = grid;
    }
}

const char* verdict(int exit_code) {
    if (exit_code == 0) return "PASS";
    if (exit_code == 1) return "FAIL";
    return "SOLVER ABORT";
}

std::vector<double> parse_values(const std::string& arg) {
    std::vector<double> out;
    std::istringstream in(arg);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ConfigError("values", "not a number: \"" + token + "\"");
        }
        if (used != token.size())
            throw ConfigError("values", "not a number: \"" + token + "\"");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("values", "empty value list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for differential Harnack inequalities"};
    app.require_subcommand(1);

    std::string name, config_path, out_dir = "out";
    double tol = 0.0;
    int grid = 0;
    std::string parameter;
    std::string values_arg;

    const auto add_common = [&](CLI::App* cmd, bool with_scenario) {
        if (with_scenario)
            cmd->add_option("scenario", name, "built-in scenario name (see list-scenarios)");
        cmd->add_option("--config", config_path, "scenario config JSON file");
        cmd->add_option("--out", out_dir, "output directory (default: out)");
        cmd->add_option("--tolerance", tol, "override tolerances.margin");
        cmd->add_option("--grid-override", grid, "override every model.points axis")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* run = app.add_subcommand("run", "run a scenario's selected checks");
    add_common(run, true);
    CLI::App* sweep = app.add_subcommand("sweep", "re-run a scenario over parameter values");
    add_common(sweep, true);
    sweep->add_option("--parameter", parameter, "dotted config path, e.g. constants.lambda")
        ->required();
    sweep->add_option("--values", values_arg, "comma separated values")->required();
    CLI::App* hyp =
        app.add_subcommand("hypotheses", "extract theorem constants and hypothesis flags");
    add_common(hyp, true);
    CLI::App* geo =
        app.add_subcommand("geometry-tests", "curvature and Kahler identity self-checks");
    add_common(geo, true);
    CLI::App* frames =
        app.add_subcommand("frames", "run only the adapted-frame residual check");
    add_common(frames, true);
    app.add_subcommand("list-scenarios", "list the built-in scenario library");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("list-scenarios")) {
            for (const std::string& n : harnack::builtin_scenario_names())
                std::printf("%-22s %s\n", n.c_str(),
                            harnack::builtin_scenario_description(n));
            return 0;
        }

        if (app.got_subcommand(geo) && name.empty() && config_path.empty()) {
            // no scenario given: exercise every stock model
            const std::string flat =
                R"({"id": "flat_geometry",
                    "model": {"variant": "flat_torus", "points": [32, 32]},
                    "checks": ["geometry"]})";
            const std::vector<std::string> configs = {
                flat, harnack::builtin_scenario_json("conformal_geometry"),
                harnack::builtin_scenario_json("sphere_geometry")};
            int worst = 0;
            for (const std::string& text : configs) {
                const harnack::Scenario sc = harnack::parse_scenario(text);
                const harnack::RunOutcome ro =
                    harnack::run_geometry_tests(sc, out_dir + "/" + sc.id);
                std::cout << sc.id << ": " << verdict(ro.exit_code) << "\n";
                worst = std::max(worst, ro.exit_code);
            }
            return worst;
        }

        json cfg = load_cfg(scenario_text(name, config_path));
        if (app.got_subcommand(frames)) cfg["checks"] = json::array({"frames"});
        apply_overrides(cfg, run->count("--tolerance") || sweep->count("--tolerance") ||
                                 hyp->count("--tolerance") || geo->count("--tolerance") ||
                                 frames->count("--tolerance"),
                        tol, grid);

        if (app.got_subcommand(sweep)) {
            const harnack::SweepOutcome so =
                harnack::sweep_scenario(cfg.dump(), parameter, parse_values(values_arg), out_dir);
            std::cout << "wrote " << out_dir << "/sweep.csv\n"
                      << verdict(so.exit_code) << "\n";
            return so.exit_code;
        }

        const harnack::Scenario sc = harnack::parse_scenario(cfg.dump());
        harnack::RunOutcome ro;
        if (app.got_subcommand(hyp))
            ro = harnack::run_hypotheses(sc, out_dir);
        else if (app.got_subcommand(geo))
            ro = harnack::run_geometry_tests(sc, out_dir);
        else
            ro = harnack::run_scenario(sc, out_dir);
        std::cout << "wrote " << ro.files[0] << "\n"
                  << sc.id << ": " << verdict(ro.exit_code) << "\n";
        return ro.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const harnack::SolverAbort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
