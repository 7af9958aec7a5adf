// lockdown-opt: optimal lockdown policies for the controlled SIR model.
//
// Precedence: built-in defaults < --config file < command line flags.
// Exit status: 0 ok, 2 bad configuration, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiments.hpp"

namespace ex = lockdown::experiments;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Overrides {
    std::string config_path;
    std::optional<double> dt, tol_t, alpha, horizon, beta, nu;
    std::optional<std::string> solver, out_dir;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_solver = true) {
    cmd->add_option("-c,--config", o.config_path, "JSON config file");
    cmd->add_option("--dt", o.dt, "RK4 step in days");
    cmd->add_option("--tol-t", o.tol_t, "switch-time tolerance in days");
    if (with_solver) {
        cmd->add_option("--solver", o.solver, "psi-root | trisection | gradient | alpha-zero");
    }
    cmd->add_option("--out-dir", o.out_dir, "directory for output files (stdout if omitted)");
    cmd->add_option("--alpha", o.alpha, "lockdown level in [0, 1)");
    cmd->add_option("-T,--horizon", o.horizon, "intervention window in days");
    cmd->add_option("--beta", o.beta, "transmission rate");
    cmd->add_option("--nu", o.nu, "removal rate");
}

nlohmann::json file_doc(const Overrides& o) {
    if (o.config_path.empty()) return nlohmann::json::object();
    return ex::load_json_file(o.config_path);
}

void apply(const Overrides& o, ex::ScenarioConfig& cfg) {
    if (o.dt) cfg.dt = *o.dt;
    if (o.tol_t) cfg.tol_t = *o.tol_t;
    if (o.solver) cfg.solver = ex::parse_solver(*o.solver);
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.horizon) cfg.horizon_T = *o.horizon;
    if (o.beta) cfg.beta = *o.beta;
    if (o.nu) cfg.nu = *o.nu;
}

ex::ScenarioConfig scenario_config(const Overrides& o) {
    ex::ScenarioConfig cfg = ex::scenario_from_json(file_doc(o));
    apply(o, cfg);
    return cfg;
}

void emit(const std::string& out_dir, const std::string& name, const std::string& text) {
    if (out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lockdown::Error("cannot write '" + path.string() + "'");
    out << text;
    std::cerr << "wrote " << path.string() << '\n';
}

int run_scenario(const Overrides& o, bool force_gradient) {
    ex::ScenarioConfig cfg = scenario_config(o);
    if (force_gradient) {
        if (o.solver && cfg.solver != ex::SolverKind::Gradient) {
            throw ex::ConfigError("--solver", "the gradient subcommand always uses the gradient solver");
        }
        cfg.solver = ex::SolverKind::Gradient;
    }
    const auto outcome = ex::run_scenario(cfg);
    if (cfg.out_dir.empty()) {
        std::cout << ex::summary_json(outcome);
    } else {
        std::cerr << "wrote " << cfg.out_dir << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal lockdown policies for the controlled SIR model"};
    app.require_subcommand(1);

    Overrides scen, grad, swp, mt;

    auto* scenario = app.add_subcommand("scenario", "solve one scenario, write trajectory and summary");
    add_common(scenario, scen);

    auto* gradient = app.add_subcommand("gradient", "solve one scenario by projected gradient");
    add_common(gradient, grad);

    auto* sweep = app.add_subcommand("sweep", "solve along one parameter axis, one CSV row per value");
    add_common(sweep, swp);
    std::optional<std::string> axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "T | alpha | R0 | t0");
    sweep->add_option("--values", values, "axis values (overrides the config's sweep section)")
        ->delimiter(',');

    auto* herd = app.add_subcommand("herd-table", "herd threshold vs final size for several R0");
    std::vector<double> r0s{1.5, 2.0, 2.5, 2.9, 3.0, 3.5};
    double s0 = 1.0 - 1e-6;
    std::string herd_out;
    herd->add_option("--r0", r0s, "R0 values")->delimiter(',');
    herd->add_option("--s0", s0, "initial susceptible fraction");
    herd->add_option("--out-dir", herd_out, "directory for herd_table.csv (stdout if omitted)");

    auto* min_time = app.add_subcommand("min-time", "shortest window reaching S_herd - epsilon");
    add_common(min_time, mt, false);
    double epsilon = 0.01;
    double tol_T = 0.1;
    min_time->add_option("--epsilon", epsilon, "target gap below S_herd");
    min_time->add_option("--tol-T", tol_T, "window-length tolerance in days");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (scenario->parsed()) return run_scenario(scen, false);
        if (gradient->parsed()) return run_scenario(grad, true);

        if (sweep->parsed()) {
            ex::SweepConfig cfg = ex::sweep_from_json(file_doc(swp));
            apply(swp, cfg.fixed);
            if (axis) cfg.axis = ex::parse_axis(*axis);
            if (!values.empty()) cfg.values = values;
            const auto rows = ex::run_sweep(cfg);
            emit(cfg.fixed.out_dir, "sweep.csv", ex::sweep_csv(cfg, rows));
            return 0;
        }

        if (herd->parsed()) {
            emit(herd_out, "herd_table.csv", ex::herd_table_csv(ex::herd_table(r0s, s0)));
            return 0;
        }

        if (min_time->parsed()) {
            const ex::ScenarioConfig cfg = scenario_config(mt);
            cfg.validate();
            lockdown::MinTimeOptions options;
            options.tol_T = tol_T;
            options.tol_t = cfg.tol_t;
            if (!(tol_T > 0.0)) throw ex::ConfigError("--tol-T", "must be positive");
            if (!(epsilon > 0.0)) throw ex::ConfigError("--epsilon", "must be positive");
            const auto report = lockdown::minimal_time(cfg.problem(), epsilon, options);
            emit(cfg.out_dir, "min_time.json", ex::min_time_json(cfg, report));
            return 0;
        }
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const lockdown::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
