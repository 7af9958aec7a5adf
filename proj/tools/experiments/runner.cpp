#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "experiments.hpp"
#include "lockdown/s_infinity.hpp"

namespace lockdown::experiments {

using nlohmann::ordered_json;

namespace {

// Rounds through the 12-significant-digit text form so JSON output matches
// the CSV precision.
ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(format_number(v));
}

struct PolicySolve {
    SwitchSolveReport report;
    std::string method;
    std::optional<GradientResult> gradient;
};

PolicySolve solve_policy(const ScenarioConfig& cfg) {
    const SwitchProblem problem = cfg.problem();
    PolicySolve out;
    switch (cfg.solver) {
        case SolverKind::PsiRoot:
            out.report = optimal_switch(problem, cfg.tol_t);
            break;
        case SolverKind::AlphaZero:
            out.report = optimal_t0_alpha_zero(problem, cfg.tol_t);
            break;
        case SolverKind::Trisection:
            out.report = trisection_t0(problem, cfg.trisection_iters);
            break;
        case SolverKind::Gradient: {
            problem.validate();
            GradientOptions options;
            options.dt = cfg.dt;
            options.tol = cfg.gradient_tol;
            options.max_iters = cfg.gradient_max_iters;
            auto result = projected_gradient(problem.params, problem.init,
                                             PiecewiseControl::constant(cfg.alpha, cfg.horizon_T, 1.0),
                                             options);
            out.report.t0_star = effective_switch_time(result.final.control);
            out.report.s_inf_star = result.final.objective;
            out.report.psi_at_zero = psi(problem, 0.0);
            out.report.iterations = result.final.iteration;
            const auto& h = result.history;
            out.report.residual = h.size() > 1 ? h.back().objective - h[h.size() - 2].objective : 0.0;
            out.method = "gradient";
            out.gradient = std::move(result);
            return out;
        }
    }
    out.method = std::string(to_string(out.report.method));
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << contents;
}

std::string csv_line(std::initializer_list<std::string> fields) {
    std::string line;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) line += ',';
        line += f;
        first = false;
    }
    line += '\n';
    return line;
}

// Errors end up in a CSV cell.
std::string sanitize(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

SweepRow sweep_point(const SweepConfig& sweep, double value) {
    SweepRow row;
    row.axis_value = value;
    ScenarioConfig cfg = sweep.fixed;
    try {
        switch (sweep.axis) {
            case SweepAxis::T: cfg.horizon_T = value; break;
            case SweepAxis::Alpha: cfg.alpha = value; break;
            case SweepAxis::R0: cfg.beta = value * cfg.nu; break;
            case SweepAxis::T0: break;
        }
        cfg.validate();

        if (sweep.axis == SweepAxis::T0) {
            const SwitchProblem problem = cfg.problem();
            row.method = "fixed-t0";
            row.t0_star = value;
            row.s_inf_star = j_value(problem, value);
            row.j_phi = j_phi(problem, value);
            row.psi0 = psi(problem, 0.0);
            row.residual = psi(problem, value);
            return row;
        }

        const PolicySolve solved = solve_policy(cfg);
        row.method = solved.method;
        row.t0_star = solved.report.t0_star;
        row.s_inf_star = solved.report.s_inf_star;
        row.psi0 = solved.report.psi_at_zero;
        row.residual = solved.report.residual;
        row.j_phi = phi(cfg.params().r0(), row.s_inf_star, 0.0);
    } catch (const std::exception& e) {
        row.error = sanitize(e.what());
        if (row.method.empty()) row.method = std::string(to_string(cfg.solver));
    }
    return row;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

ScenarioOutcome solve_scenario(const ScenarioConfig& config) {
    config.validate();
    PolicySolve solved = solve_policy(config);

    ScenarioOutcome outcome{config, solved.report, std::move(solved.gradient), {}};
    const auto params = config.params();
    const auto init = config.initial_state();
    const double t_end = 2.0 * config.horizon_T;
    if (outcome.gradient) {
        outcome.trajectory = integrate(params, init, outcome.gradient->final.control, t_end, config.dt);
    } else {
        const BangBangControl policy(outcome.report.t0_star, config.alpha, config.horizon_T);
        outcome.trajectory = integrate(params, init, policy.to_piecewise(), t_end, config.dt);
    }
    return outcome;
}

std::string trajectory_csv(const ScenarioOutcome& outcome) {
    const Trajectory& tr = outcome.trajectory;
    std::string out(kSchemaLine);
    out += "\nt,S,I,R,u\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        // Nodes inserted at off-grid switch times are skipped.
        const double cell = std::round(tr.t[k] / tr.dt);
        if (std::abs(tr.t[k] - cell * tr.dt) > kNodeTol) continue;
        out += csv_line({format_number(tr.t[k]), format_number(tr.s[k]), format_number(tr.i[k]),
                         format_number(tr.r[k]), format_number(tr.u[k])});
    }
    return out;
}

std::string summary_json(const ScenarioOutcome& outcome) {
    const ScenarioConfig& cfg = outcome.config;
    const auto params = cfg.params();
    const auto init = cfg.initial_state();
    const double herd = herd_threshold(params);

    ordered_json j;
    j["schema"] = std::string(kSchemaLine.substr(2));
    j["solver"] = std::string(to_string(cfg.solver));
    j["method"] = outcome.gradient ? std::string("gradient")
                                   : std::string(to_string(outcome.report.method));
    j["beta"] = number(cfg.beta);
    j["nu"] = number(cfg.nu);
    j["r0"] = number(params.r0());
    j["population"] = number(cfg.population);
    j["s0"] = number(init.s);
    j["i0"] = number(init.i);
    j["alpha"] = number(cfg.alpha);
    j["horizon_T"] = number(cfg.horizon_T);
    j["dt"] = number(cfg.dt);
    j["herd_threshold"] = number(herd);
    j["alpha_bar"] = init.s > herd ? number(alpha_bar(params, init)) : ordered_json(nullptr);
    j["t0_star"] = number(outcome.report.t0_star);
    j["s_inf_star"] = number(outcome.report.s_inf_star);
    j["s_inf_uncontrolled"] = number(s_infinity_from_state(params, init.s, init.i));
    j["psi0"] = number(outcome.report.psi_at_zero);
    j["iterations"] = outcome.report.iterations;
    j["residual"] = number(outcome.report.residual);
    if (outcome.gradient) {
        j["converged"] = outcome.gradient->converged;
        j["stop_reason"] = outcome.gradient->stop_reason;
    }
    return j.dump(2) + "\n";
}

std::string gradient_history_csv(const GradientResult& result) {
    std::string out(kSchemaLine);
    out += "\niteration,objective,step,switch_time\n";
    for (const auto& r : result.history) {
        out += csv_line({std::to_string(r.iteration), format_number(r.objective),
                         format_number(r.step), format_number(r.switch_time)});
    }
    return out;
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
    ScenarioOutcome outcome = solve_scenario(config);
    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / config.trajectory_file, trajectory_csv(outcome));
        write_file(dir / config.summary_file, summary_json(outcome));
        if (outcome.gradient) {
            write_file(dir / "gradient_history.csv", gradient_history_csv(*outcome.gradient));
        }
    }
    return outcome;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("LOCKDOWN_OPT_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, std::size_t threads) {
    config.validate();
    std::vector<SweepRow> rows(config.values.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            rows[k] = sweep_point(config, config.values[k]);
        }
    };
    const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, rows.size()));
    std::vector<std::jthread> pool;
    pool.reserve(n - 1);
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
    work();
    return rows;
}

std::string sweep_csv(const SweepConfig& config, const std::vector<SweepRow>& rows) {
    std::string out(kSchemaLine);
    out += "\n# axis=";
    out += to_string(config.axis);
    out += "\naxis_value,t0_star,s_inf_star,psi0,method,residual,j_phi,error\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            out += csv_line({format_number(r.axis_value), "", "", "", r.method, "", "", r.error});
            continue;
        }
        out += csv_line({format_number(r.axis_value), format_number(r.t0_star),
                         format_number(r.s_inf_star), format_number(r.psi0), r.method,
                         format_number(r.residual), format_number(r.j_phi), ""});
    }
    return out;
}

std::vector<HerdRow> herd_table(const std::vector<double>& r0_values, double s0) {
    if (!(s0 > 0.0 && s0 < 1.0)) throw DomainError("S0 must lie in (0, 1)");
    std::vector<HerdRow> rows;
    rows.reserve(r0_values.size());
    for (double r0 : r0_values) {
        if (!(r0 > 1.0)) throw DomainError("R0 must exceed 1, got " + format_number(r0));
        const EpidemicParams params{r0, 1.0};
        HerdRow row;
        row.r0 = r0;
        row.s_herd = herd_threshold(params);
        row.s_inf = s_infinity_from_state(params, s0, 1.0 - s0);
        row.ratio = (row.s_herd - row.s_inf) / (1.0 - row.s_inf);
        rows.push_back(row);
    }
    return rows;
}

std::string herd_table_csv(const std::vector<HerdRow>& rows) {
    std::string out(kSchemaLine);
    out += "\nr0,s_herd,s_inf,ratio\n";
    for (const auto& r : rows) {
        out += csv_line({format_number(r.r0), format_number(r.s_herd), format_number(r.s_inf),
                         format_number(r.ratio)});
    }
    return out;
}

std::string min_time_json(const ScenarioConfig& config, const MinTimeReport& report) {
    const auto params = config.params();
    const double herd = herd_threshold(params);
    ordered_json j;
    j["schema"] = std::string(kSchemaLine.substr(2));
    j["alpha"] = number(config.alpha);
    j["epsilon"] = number(report.epsilon);
    j["target_s_inf"] = number(herd - report.epsilon);
    j["herd_threshold"] = number(herd);
    j["alpha_bar"] = number(alpha_bar(params, config.initial_state()));
    j["t_star"] = number(report.t_star);
    j["t0_star_at_t_star"] = number(report.t0_star_at_t_star);
    j["s_inf_achieved"] = number(report.s_inf_achieved);
    j["bracket_width"] = number(report.bracket_width);
    j["iterations"] = report.iterations;
    return j.dump(2) + "\n";
}

}  // namespace lockdown::experiments
