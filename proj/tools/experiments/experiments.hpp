#pragma once

// Scenario / sweep harness behind the lockdown-opt command line tool.
//
// Config files are JSON with four optional sections (defaults reproduce the
// France March-May 2020 parameter set):
//
//   {
//     "model":   {"beta": 0.29, "nu": 0.1, "population": 6.7e7,
//                 "initial_infected": 1000, "initial_removed": 0},
//     "control": {"alpha": 0.231, "horizon_T": 100},
//     "solver":  {"name": "psi-root", "dt": 0.01, "tol_t": 0.001,
//                 "trisection_iters": 60, "gradient_tol": 1e-9,
//                 "gradient_max_iters": 5000},
//     "output":  {"dir": "out", "trajectory": "trajectory.csv",
//                 "summary": "summary.json"},
//     "sweep":   {"axis": "alpha", "values": [0, 0.1, 0.2]}
//   }
//
// "initial_infected" is an absolute count divided by "population";
// "initial_infected_fraction" gives the fraction directly. Command line flags
// override file values.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lockdown/adjoint.hpp"
#include "lockdown/errors.hpp"
#include "lockdown/min_time.hpp"
#include "lockdown/switching.hpp"

namespace lockdown::experiments {

inline constexpr std::string_view kSchemaLine = "# lockdown-opt schema v1";

// Invalid configuration; `field` is the dotted path of the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class SolverKind { PsiRoot, Trisection, Gradient, AlphaZero };

SolverKind parse_solver(std::string_view name);
std::string_view to_string(SolverKind kind);

struct ScenarioConfig {
    double beta = 0.29;
    double nu = 0.1;
    double population = 6.7e7;
    double initial_infected = 1e3;  // absolute count
    std::optional<double> initial_infected_fraction;
    double initial_removed = 0.0;  // absolute count

    double alpha = 0.231;
    double horizon_T = 100.0;

    SolverKind solver = SolverKind::PsiRoot;
    double dt = kDefaultDt;
    double tol_t = kDefaultTolT;
    int trisection_iters = kDefaultTrisectionIters;
    double gradient_tol = 1e-9;
    int gradient_max_iters = 5000;

    std::string out_dir;  // empty: do not write files
    std::string trajectory_file = "trajectory.csv";
    std::string summary_file = "summary.json";

    EpidemicParams params() const { return {beta, nu}; }
    EpidemicState initial_state() const;
    SwitchProblem problem() const;

    // Checks every precondition of the solvers that will run. Throws
    // ConfigError naming the field.
    void validate() const;
};

enum class SweepAxis { T, Alpha, R0, T0 };

SweepAxis parse_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

struct SweepConfig {
    SweepAxis axis = SweepAxis::T;
    std::vector<double> values;
    ScenarioConfig fixed;

    void validate() const;
};

// Applies the sections of `doc` on top of `base`. Unknown keys are errors.
ScenarioConfig scenario_from_json(const nlohmann::json& doc, ScenarioConfig base = {});
SweepConfig sweep_from_json(const nlohmann::json& doc, ScenarioConfig base = {});

// Reads and parses a JSON file; ConfigError on I/O or syntax problems.
nlohmann::json load_json_file(const std::string& path);

// Outcome of one scenario solve.
struct ScenarioOutcome {
    ScenarioConfig config;
    SwitchSolveReport report;
    std::optional<GradientResult> gradient;  // only for the gradient solver
    Trajectory trajectory;                   // optimal policy on [0, 2T]
};

ScenarioOutcome solve_scenario(const ScenarioConfig& config);

// Columns t,S,I,R,u at dt resolution.
std::string trajectory_csv(const ScenarioOutcome& outcome);
// Stable key order, 12 significant digits.
std::string summary_json(const ScenarioOutcome& outcome);
// iteration,objective,step,switch_time for gradient runs.
std::string gradient_history_csv(const GradientResult& result);

// Solves, then writes trajectory CSV and summary JSON (plus the gradient
// history for gradient runs) into config.out_dir when it is set.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

struct SweepRow {
    double axis_value = 0.0;
    double t0_star = 0.0;
    double s_inf_star = 0.0;
    double psi0 = 0.0;
    std::string method;
    double residual = 0.0;
    double j_phi = 0.0;
    std::string error;  // non-empty when this point failed
};

// Worker-pool size: LOCKDOWN_OPT_THREADS if set and positive, otherwise the
// hardware concurrency.
std::size_t worker_count();

// One row per value, in input order. Failures are recorded in the row.
std::vector<SweepRow> run_sweep(const SweepConfig& config, std::size_t threads = worker_count());
std::string sweep_csv(const SweepConfig& config, const std::vector<SweepRow>& rows);

struct HerdRow {
    double r0 = 0.0;
    double s_herd = 0.0;
    double s_inf = 0.0;
    double ratio = 0.0;  // (S_herd - S_inf) / (1 - S_inf)
};

// Naive-population reference table: S0 given, I0 = 1 - S0.
std::vector<HerdRow> herd_table(const std::vector<double>& r0_values, double s0);
std::string herd_table_csv(const std::vector<HerdRow>& rows);

std::string min_time_json(const ScenarioConfig& config, const MinTimeReport& report);

// printf("%.12g").
std::string format_number(double value);

}  // namespace lockdown::experiments
