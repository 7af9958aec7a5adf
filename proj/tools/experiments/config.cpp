#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "experiments.hpp"

namespace lockdown::experiments {

using nlohmann::json;

namespace {

// Reads the keys of one config section and rejects keys nobody asked for.
class Section {
public:
    Section(const json& doc, std::string name) : name_(std::move(name)) {
        if (!doc.contains(name_)) return;
        node_ = &doc.at(name_);
        if (!node_->is_object()) throw ConfigError(name_, "must be an object");
    }

    void read(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw ConfigError(path(key), "must be a number");
            out = v->get<double>();
        }
    }

    void read(const char* key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw ConfigError(path(key), "must be a number");
            out = v->get<double>();
        }
    }

    void read(const char* key, int& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
            out = v->get<int>();
        }
    }

    void read(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) throw ConfigError(path(key), "must be a string");
            out = v->get<std::string>();
        }
    }

    const json* take(const char* key) {
        seen_.insert(key);
        if (node_ == nullptr || !node_->contains(key)) return nullptr;
        return &node_->at(key);
    }

    void finish() const {
        if (node_ == nullptr) return;
        for (const auto& item : node_->items()) {
            if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
        }
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

private:
    std::string name_;
    const json* node_ = nullptr;
    std::set<std::string> seen_;
};

void check_top_level(const json& doc, std::initializer_list<const char*> allowed) {
    if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    for (const auto& item : doc.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || item.key() == a;
        if (!known) throw ConfigError(item.key(), "unknown section");
    }
}

ScenarioConfig apply_sections(const json& doc, ScenarioConfig cfg) {
    Section model(doc, "model");
    model.read("beta", cfg.beta);
    model.read("nu", cfg.nu);
    model.read("population", cfg.population);
    model.read("initial_infected", cfg.initial_infected);
    model.read("initial_infected_fraction", cfg.initial_infected_fraction);
    model.read("initial_removed", cfg.initial_removed);
    model.finish();

    Section control(doc, "control");
    control.read("alpha", cfg.alpha);
    control.read("horizon_T", cfg.horizon_T);
    control.finish();

    Section solver(doc, "solver");
    std::string name;
    solver.read("name", name);
    if (!name.empty()) {
        try {
            cfg.solver = parse_solver(name);
        } catch (const ConfigError&) {
            throw ConfigError("solver.name", "unknown solver '" + name + "'");
        }
    }
    solver.read("dt", cfg.dt);
    solver.read("tol_t", cfg.tol_t);
    solver.read("trisection_iters", cfg.trisection_iters);
    solver.read("gradient_tol", cfg.gradient_tol);
    solver.read("gradient_max_iters", cfg.gradient_max_iters);
    solver.finish();

    Section output(doc, "output");
    output.read("dir", cfg.out_dir);
    output.read("trajectory", cfg.trajectory_file);
    output.read("summary", cfg.summary_file);
    output.finish();
    return cfg;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

SolverKind parse_solver(std::string_view name) {
    if (name == "psi-root") return SolverKind::PsiRoot;
    if (name == "trisection") return SolverKind::Trisection;
    if (name == "gradient") return SolverKind::Gradient;
    if (name == "alpha-zero") return SolverKind::AlphaZero;
    throw ConfigError("solver.name", "unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::PsiRoot: return "psi-root";
        case SolverKind::Trisection: return "trisection";
        case SolverKind::Gradient: return "gradient";
        case SolverKind::AlphaZero: return "alpha-zero";
    }
    return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
    if (name == "T") return SweepAxis::T;
    if (name == "alpha") return SweepAxis::Alpha;
    if (name == "R0") return SweepAxis::R0;
    if (name == "t0") return SweepAxis::T0;
    throw ConfigError("sweep.axis", "unknown axis '" + std::string(name) +
                                        "' (expected T, alpha, R0 or t0)");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::T: return "T";
        case SweepAxis::Alpha: return "alpha";
        case SweepAxis::R0: return "R0";
        case SweepAxis::T0: return "t0";
    }
    return "unknown";
}

EpidemicState ScenarioConfig::initial_state() const {
    const double i0 = initial_infected_fraction ? *initial_infected_fraction
                                                : initial_infected / population;
    const double r0 = initial_removed / population;
    return {1.0 - i0 - r0, i0, r0, 0.0};
}

SwitchProblem ScenarioConfig::problem() const {
    return {params(), initial_state(), alpha, horizon_T, dt};
}

void ScenarioConfig::validate() const {
    if (!finite_positive(beta)) throw ConfigError("model.beta", "must be positive");
    if (!finite_positive(nu)) throw ConfigError("model.nu", "must be positive");
    if (!(beta > nu)) throw ConfigError("model.beta", "R0 = beta/nu must exceed 1");
    if (!finite_positive(population)) throw ConfigError("model.population", "must be positive");
    if (initial_infected_fraction) {
        const double f = *initial_infected_fraction;
        if (!(f > 0.0 && f < 1.0)) {
            throw ConfigError("model.initial_infected_fraction",
                              "must lie in (0, 1): there is no epidemic to control otherwise");
        }
    } else if (!(initial_infected > 0.0 && initial_infected < population)) {
        throw ConfigError("model.initial_infected",
                          "must lie in (0, population): there is no epidemic to control otherwise");
    }
    if (!(initial_removed >= 0.0 && initial_removed < population)) {
        throw ConfigError("model.initial_removed", "must lie in [0, population)");
    }
    if (!(initial_state().s > 0.0)) {
        throw ConfigError("model.initial_infected", "leaves no susceptible population");
    }
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("control.alpha", "must lie in [0, 1)");
    if (!finite_positive(horizon_T)) throw ConfigError("control.horizon_T", "must be positive");
    if (!finite_positive(dt)) throw ConfigError("solver.dt", "must be positive");
    if (dt > horizon_T) throw ConfigError("solver.dt", "must not exceed horizon_T");
    if (!finite_positive(tol_t)) throw ConfigError("solver.tol_t", "must be positive");
    if (trisection_iters < 0) throw ConfigError("solver.trisection_iters", "must be >= 0");
    if (!finite_positive(gradient_tol)) throw ConfigError("solver.gradient_tol", "must be positive");
    if (gradient_max_iters < 0) throw ConfigError("solver.gradient_max_iters", "must be >= 0");
    if (solver == SolverKind::AlphaZero && alpha != 0.0) {
        throw ConfigError("solver.name", "alpha-zero requires control.alpha = 0");
    }
}

void SweepConfig::validate() const {
    if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
    fixed.validate();
    for (double v : values) {
        const std::string where = "sweep.values";
        switch (axis) {
            case SweepAxis::T:
                if (!finite_positive(v)) throw ConfigError(where, "T values must be positive");
                if (fixed.dt > v) throw ConfigError(where, "T values must be >= dt");
                break;
            case SweepAxis::Alpha:
                if (!(v >= 0.0 && v < 1.0)) throw ConfigError(where, "alpha values must lie in [0, 1)");
                if (fixed.solver == SolverKind::AlphaZero && v != 0.0) {
                    throw ConfigError("solver.name", "alpha-zero cannot sweep nonzero alpha");
                }
                break;
            case SweepAxis::R0:
                if (!(std::isfinite(v) && v > 1.0)) throw ConfigError(where, "R0 values must exceed 1");
                break;
            case SweepAxis::T0:
                if (!(v >= 0.0 && v <= fixed.horizon_T)) {
                    throw ConfigError(where, "t0 values must lie in [0, horizon_T]");
                }
                break;
        }
    }
}

ScenarioConfig scenario_from_json(const json& doc, ScenarioConfig base) {
    check_top_level(doc, {"model", "control", "solver", "output", "sweep"});
    return apply_sections(doc, std::move(base));
}

SweepConfig sweep_from_json(const json& doc, ScenarioConfig base) {
    SweepConfig sweep;
    sweep.fixed = scenario_from_json(doc, std::move(base));
    if (!doc.contains("sweep")) return sweep;

    Section section(doc, "sweep");
    std::string axis;
    section.read("axis", axis);
    if (!axis.empty()) sweep.axis = parse_axis(axis);

    if (const json* values = section.take("values")) {
        if (!values->is_array()) throw ConfigError("sweep.values", "must be an array of numbers");
        for (const auto& v : *values) {
            if (!v.is_number()) throw ConfigError("sweep.values", "must be an array of numbers");
            sweep.values.push_back(v.get<double>());
        }
    }
    std::optional<double> from, to, step;
    section.read("from", from);
    section.read("to", to);
    section.read("step", step);
    section.finish();
    if (from || to || step) {
        if (!sweep.values.empty()) throw ConfigError("sweep", "give either values or from/to/step");
        if (!(from && to && step)) throw ConfigError("sweep", "from, to and step go together");
        if (!(*step > 0.0) || *to < *from) throw ConfigError("sweep.step", "need step > 0, to >= from");
        const auto n = static_cast<long>(std::floor((*to - *from) / *step + 1e-9));
        for (long k = 0; k <= n; ++k) sweep.values.push_back(*from + static_cast<double>(k) * *step);
    }
    return sweep;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace lockdown::experiments
