#include "lockdown/adjoint.hpp"

#include <algorithm>
#include <cmath>

#include "lockdown/errors.hpp"
#include "lockdown/s_infinity.hpp"

namespace lockdown {

namespace {

struct Costate {
    double ps;
    double pi;
};

Costate adjoint_rhs(const Costate& p, double s, double i, double u, const EpidemicParams& par) {
    const double bu = par.beta * u;
    return {bu * i * (p.ps - p.pi), bu * s * p.ps - (bu * s - par.nu) * p.pi + par.nu * (u - 1.0)};
}

void check_aligned(const Trajectory& traj, const AdjointTrajectory& adj) {
    if (adj.size() < 2 || adj.size() > traj.size()) {
        throw GridMismatchError("adjoint does not match the trajectory");
    }
    for (std::size_t k = 0; k < adj.size(); k += adj.size() - 1) {
        if (std::abs(adj.t[k] - traj.t[k]) > kNodeTol) {
            throw GridMismatchError("adjoint and trajectory grids differ");
        }
    }
}

std::vector<double> cell_values(const PiecewiseControl& control, double dt) {
    const auto n = static_cast<std::size_t>(std::ceil((control.horizon() - kNodeTol) / dt));
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = static_cast<double>(k) * dt;
        const double b = std::min(a + dt, control.horizon());
        v[k] = std::clamp(control.on_interval(a, b), control.alpha(), 1.0);
    }
    return v;
}

}  // namespace

AdjointTrajectory integrate_adjoint(const Trajectory& traj, const PiecewiseControl& control,
                                    const EpidemicParams& params) {
    const double T = control.horizon();
    const std::size_t n_end = traj.find_node(T);
    if (n_end == traj.size()) {
        throw GridMismatchError("trajectory does not have a node at the horizon T");
    }
    for (double ts : control.switch_times()) {
        if (traj.find_node(ts) == traj.size()) {
            throw GridMismatchError("control switch at t = " + std::to_string(ts) +
                                    " is not a trajectory node");
        }
    }
    for (std::size_t k = 0; k < n_end; ++k) {
        if (std::abs(traj.u_step[k] - control.on_interval(traj.t[k], traj.t[k + 1])) > 1e-12) {
            throw GridMismatchError("trajectory was integrated with a different control");
        }
    }

    AdjointTrajectory adj;
    adj.t.assign(traj.t.begin(), traj.t.begin() + static_cast<std::ptrdiff_t>(n_end) + 1);
    adj.p_s.assign(n_end + 1, 0.0);
    adj.p_i.assign(n_end + 1, 0.0);

    Costate p{0.0, 0.0};
    for (std::size_t k = n_end; k-- > 0;) {
        const double h = traj.t[k + 1] - traj.t[k];
        const double u = traj.u_step[k];
        const double sa = traj.s[k], ia = traj.i[k];
        const double sb = traj.s[k + 1], ib = traj.i[k + 1];
        const auto da = sir_rhs(sa, ia, u, params);
        const auto db = sir_rhs(sb, ib, u, params);
        const double sm = hermite_interpolate(h, sa, sb, da.ds, db.ds, 0.5);
        const double im = hermite_interpolate(h, ia, ib, da.di, db.di, 0.5);

        // RK4 with step -h from t[k+1] to t[k].
        const auto k1 = adjoint_rhs(p, sb, ib, u, params);
        const auto k2 = adjoint_rhs({p.ps - 0.5 * h * k1.ps, p.pi - 0.5 * h * k1.pi}, sm, im, u, params);
        const auto k3 = adjoint_rhs({p.ps - 0.5 * h * k2.ps, p.pi - 0.5 * h * k2.pi}, sm, im, u, params);
        const auto k4 = adjoint_rhs({p.ps - h * k3.ps, p.pi - h * k3.pi}, sa, ia, u, params);
        p.ps -= h / 6.0 * (k1.ps + 2.0 * k2.ps + 2.0 * k3.ps + k4.ps);
        p.pi -= h / 6.0 * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi);
        if (!std::isfinite(p.ps) || !std::isfinite(p.pi)) {
            throw IntegrationError("non-finite adjoint state");
        }
        adj.p_s[k] = p.ps;
        adj.p_i[k] = p.pi;
    }
    return adj;
}

std::vector<double> gradient_density(const Trajectory& traj, const AdjointTrajectory& adj,
                                     const EpidemicParams& params) {
    check_aligned(traj, adj);
    std::vector<double> g(adj.size());
    for (std::size_t k = 0; k < adj.size(); ++k) {
        g[k] = (params.nu - params.beta * traj.s[k] * (adj.p_i[k] - adj.p_s[k])) * traj.i[k];
    }
    return g;
}

std::vector<double> switching_function(const Trajectory& traj, const AdjointTrajectory& adj) {
    check_aligned(traj, adj);
    std::vector<double> w(adj.size());
    for (std::size_t k = 0; k < adj.size(); ++k) {
        w[k] = traj.s[k] * (adj.p_s[k] - adj.p_i[k]);
    }
    return w;
}

double j_phi_directional_derivative(const Trajectory& traj, const AdjointTrajectory& adj,
                                    const EpidemicParams& params,
                                    std::span<const double> direction) {
    if (direction.size() + 1 != adj.size()) {
        throw GridMismatchError("direction needs one value per adjoint step");
    }
    const auto g = gradient_density(traj, adj, params);
    double sum = 0.0;
    for (std::size_t k = 0; k < direction.size(); ++k) {
        sum += direction[k] * 0.5 * (g[k] + g[k + 1]) * (adj.t[k + 1] - adj.t[k]);
    }
    return sum;
}

double s_infinity_directional_derivative(const Trajectory& traj, const AdjointTrajectory& adj,
                                         const EpidemicParams& params,
                                         std::span<const double> direction) {
    const std::size_t n = adj.size() - 1;
    const double s_inf = s_infinity_from_state(params, traj.s[n], traj.i[n]);
    const double dphi_ds = 1.0 - herd_threshold(params) / s_inf;
    return j_phi_directional_derivative(traj, adj, params, direction) / dphi_ds;
}

PiecewiseControl project(const PiecewiseControl& control) {
    std::vector<double> v = control.values();
    for (double& x : v) x = std::clamp(x, control.alpha(), 1.0);
    return PiecewiseControl(control.alpha(), control.horizon(), control.breakpoints(), std::move(v));
}

double effective_switch_time(const PiecewiseControl& control) {
    const auto& bp = control.breakpoints();
    const auto& v = control.values();
    double sum = 0.0;
    for (std::size_t k = 0; k < bp.size(); ++k) {
        const double end = k + 1 < bp.size() ? bp[k + 1] : control.horizon();
        sum += (end - bp[k]) * (v[k] - control.alpha());
    }
    return sum / (1.0 - control.alpha());
}

double l1_distance(const PiecewiseControl& a, const PiecewiseControl& b, double dt) {
    const double T = std::max(a.horizon(), b.horizon());
    const auto n = static_cast<std::size_t>(std::ceil((T - kNodeTol) / dt));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = static_cast<double>(k) * dt;
        const double hi = std::min(lo + dt, T);
        const double mid = 0.5 * (lo + hi);
        sum += std::abs(a(mid) - b(mid)) * (hi - lo);
    }
    return sum;
}

GradientResult projected_gradient(const EpidemicParams& params, const EpidemicState& init,
                                  const PiecewiseControl& u0, const GradientOptions& options) {
    params.validate();
    init.validate();
    if (!(init.i > 0.0)) throw DomainError("I0 must be positive: there is no epidemic to control");
    if (!(options.tol > 0.0)) throw DomainError("tol must be positive");
    if (!(options.dt > 0.0)) throw DomainError("dt must be positive");
    if (options.max_iters < 0) throw DomainError("max_iters must be nonnegative");

    const double alpha = u0.alpha();
    const double T = u0.horizon();
    const double dt = options.dt;

    std::vector<double> u = cell_values(u0, dt);
    auto make_control = [&](std::vector<double> cells) {
        return PiecewiseControl::from_cells(alpha, T, dt, std::move(cells));
    };

    PiecewiseControl control = make_control(u);
    Trajectory traj = integrate(params, init, control, T, dt);
    double objective = s_infinity_from_state(params, traj.s.back(), traj.i.back());

    GradientResult result{{control, objective, 0.0, 0}, {}, false, ""};
    result.history.push_back({0, objective, 0.0, effective_switch_time(control)});

    std::vector<double> direction(u.size());
    std::vector<double> candidate(u.size());
    for (int it = 1; it <= options.max_iters; ++it) {
        const AdjointTrajectory adj = integrate_adjoint(traj, control, params);
        const auto g = gradient_density(traj, adj, params);
        double scale = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            direction[k] = 0.5 * (g[k] + g[k + 1]);
            scale = std::max(scale, std::abs(direction[k]));
        }
        if (scale == 0.0) {
            result.converged = true;
            result.stop_reason = "zero gradient";
            break;
        }
        for (double& d : direction) d /= scale;

        bool accepted = false;
        bool moved = false;
        double rho = 1.0;
        double trial_objective = objective;
        Trajectory trial_traj;
        for (; rho >= options.min_step; rho *= 0.5) {
            moved = false;
            for (std::size_t k = 0; k < u.size(); ++k) {
                candidate[k] = std::clamp(u[k] - rho * direction[k], alpha, 1.0);
                moved = moved || candidate[k] != u[k];
            }
            if (!moved) break;
            trial_traj = integrate(params, init, make_control(candidate), T, dt);
            trial_objective =
                s_infinity_from_state(params, trial_traj.s.back(), trial_traj.i.back());
            if (trial_objective > objective) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            result.converged = true;
            result.stop_reason = moved ? "step floor reached" : "projected gradient vanishes";
            break;
        }

        const double gain = trial_objective - objective;
        u = candidate;
        control = make_control(u);
        traj = std::move(trial_traj);
        objective = trial_objective;
        result.final = {control, objective, rho, it};
        result.history.push_back({it, objective, rho, effective_switch_time(control)});
        if (gain <= options.tol) {
            result.converged = true;
            result.stop_reason = "objective gain below tol";
            break;
        }
    }
    if (!result.converged) result.stop_reason = "max_iters reached";
    return result;
}

}  // namespace lockdown
