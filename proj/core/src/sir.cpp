#include "lockdown/sir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lockdown/errors.hpp"

namespace lockdown {

EpidemicParams EpidemicParams::create(double beta, double nu) {
    EpidemicParams p{beta, nu};
    p.validate();
    return p;
}

void EpidemicParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("beta must be positive, got " + std::to_string(beta));
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw DomainError("nu must be positive, got " + std::to_string(nu));
    }
    if (!(beta > nu)) {
        throw DomainError("R0 = beta/nu must exceed 1, got " + std::to_string(beta / nu));
    }
}

EpidemicState EpidemicState::from_fractions(double s, double i, double t) {
    EpidemicState st{s, i, 1.0 - s - i, t};
    if (std::abs(st.r) < 1e-15) st.r = 0.0;
    st.validate();
    return st;
}

void EpidemicState::validate() const {
    if (!(s > 0.0)) throw DomainError("susceptible fraction must be positive");
    if (!(i >= 0.0)) throw DomainError("infected fraction must be nonnegative");
    if (!(r >= 0.0)) throw DomainError("removed fraction must be nonnegative");
    if (std::abs(s + i + r - 1.0) > 1e-9) {
        throw DomainError("compartments must sum to 1 (got " + std::to_string(s + i + r) + ")");
    }
}

PiecewiseControl::PiecewiseControl(double alpha, double horizon, std::vector<double> breakpoints,
                                   std::vector<double> values)
    : alpha_(alpha), horizon_(horizon), breakpoints_(std::move(breakpoints)),
      values_(std::move(values)) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
    if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
        throw DomainError("control needs one value per breakpoint");
    }
    if (breakpoints_.front() != 0.0) throw DomainError("first breakpoint must be 0");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
        if (!(breakpoints_[k] > breakpoints_[k - 1])) {
            throw DomainError("breakpoints must be strictly increasing");
        }
    }
    if (breakpoints_.back() > horizon_) throw DomainError("breakpoints must lie in [0, T]");
    constexpr double slack = 1e-12;
    for (double v : values_) {
        if (!(v >= alpha_ - slack && v <= 1.0 + slack)) {
            throw DomainError("control value " + std::to_string(v) + " outside [alpha, 1]");
        }
    }
}

PiecewiseControl PiecewiseControl::constant(double alpha, double horizon, double value) {
    return PiecewiseControl(alpha, horizon, {0.0}, {value});
}

PiecewiseControl PiecewiseControl::from_cells(double alpha, double horizon, double dt,
                                              std::vector<double> cell_values) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    const auto n = static_cast<std::size_t>(std::ceil((horizon - kNodeTol) / dt));
    if (cell_values.size() != n) {
        throw GridMismatchError("expected " + std::to_string(n) + " cell values, got " +
                                std::to_string(cell_values.size()));
    }
    std::vector<double> bps(n);
    for (std::size_t k = 0; k < n; ++k) bps[k] = static_cast<double>(k) * dt;
    return PiecewiseControl(alpha, horizon, std::move(bps), std::move(cell_values));
}

double PiecewiseControl::operator()(double t) const {
    if (t > horizon_) return 1.0;
    if (t <= 0.0) return values_.front();
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

std::vector<double> PiecewiseControl::switch_times() const {
    std::vector<double> out(breakpoints_.begin() + 1, breakpoints_.end());
    out.push_back(horizon_);
    return out;
}

BangBangControl::BangBangControl(double t0_, double alpha_, double horizon_)
    : t0(t0_), alpha(alpha_), horizon(horizon_) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
    if (!(t0 >= 0.0 && t0 <= horizon)) throw DomainError("switch time must lie in [0, T]");
}

PiecewiseControl BangBangControl::to_piecewise() const {
    if (t0 <= kNodeTol) return PiecewiseControl::constant(alpha, horizon, alpha);
    if (t0 >= horizon - kNodeTol) return PiecewiseControl::constant(alpha, horizon, 1.0);
    return PiecewiseControl(alpha, horizon, {0.0, t0}, {1.0, alpha});
}

std::size_t Trajectory::find_node(double time) const {
    const auto it = std::lower_bound(t.begin(), t.end(), time - kNodeTol);
    if (it != t.end() && std::abs(*it - time) <= kNodeTol) {
        return static_cast<std::size_t>(it - t.begin());
    }
    return size();
}

EpidemicState rk4_step(const EpidemicState& x, double u, const EpidemicParams& p, double dt) {
    const auto k1 = sir_rhs(x.s, x.i, u, p);
    const auto k2 = sir_rhs(x.s + 0.5 * dt * k1.ds, x.i + 0.5 * dt * k1.di, u, p);
    const auto k3 = sir_rhs(x.s + 0.5 * dt * k2.ds, x.i + 0.5 * dt * k2.di, u, p);
    const auto k4 = sir_rhs(x.s + dt * k3.ds, x.i + dt * k3.di, u, p);

    const double ds = dt / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
    const double di = dt / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di);
    EpidemicState out{x.s + ds, x.i + di, x.r - ds - di, x.t + dt};
    if (!std::isfinite(out.s) || !std::isfinite(out.i) || !std::isfinite(out.r)) {
        throw IntegrationError("non-finite state at t = " + std::to_string(out.t) +
                               "; reduce dt");
    }
    return out;
}

namespace {

std::vector<double> build_grid(const PiecewiseControl& control, double t_end, double dt) {
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::ceil((t_end - kNodeTol) / dt));
    grid.reserve(n + 4);
    for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) * dt);
    grid.push_back(t_end);

    for (double ts : control.switch_times()) {
        if (ts <= kNodeTol || ts >= t_end - kNodeTol) continue;
        const double k = std::round(ts / dt);
        if (std::abs(ts - k * dt) <= kNodeTol) continue;
        grid.push_back(ts);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

}  // namespace

Trajectory integrate(const EpidemicParams& params, const EpidemicState& init,
                     const PiecewiseControl& control, double t_end, double dt) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    init.validate();

    Trajectory traj;
    traj.dt = dt;
    traj.t = build_grid(control, t_end, dt);
    const std::size_t n = traj.t.size();
    traj.s.resize(n);
    traj.i.resize(n);
    traj.r.resize(n);
    traj.u.resize(n);
    traj.u_step.resize(n - 1);

    EpidemicState x{init.s, init.i, init.r, 0.0};
    traj.s[0] = x.s;
    traj.i[0] = x.i;
    traj.r[0] = x.r;
    traj.u[0] = control(0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = traj.t[k];
        const double b = traj.t[k + 1];
        const double u = control.on_interval(a, b);
        traj.u_step[k] = u;
        x = rk4_step(x, u, params, b - a);
        x.t = b;
        traj.s[k + 1] = x.s;
        traj.i[k + 1] = x.i;
        traj.r[k + 1] = x.r;
        traj.u[k + 1] = control(b);
    }
    return traj;
}

Derivative interpolate_si(const Trajectory& traj, const EpidemicParams& params, double time) {
    if (time < traj.t.front() - kNodeTol || time > traj.t.back() + kNodeTol) {
        throw DomainError("interpolation time outside the trajectory");
    }
    const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), time);
    std::size_t k = it == traj.t.begin() ? 0 : static_cast<std::size_t>(it - traj.t.begin()) - 1;
    if (k + 1 >= traj.size()) k = traj.size() - 2;

    const double h = traj.t[k + 1] - traj.t[k];
    const double theta = std::clamp((time - traj.t[k]) / h, 0.0, 1.0);
    const double u = traj.u_step[k];
    const auto da = sir_rhs(traj.s[k], traj.i[k], u, params);
    const auto db = sir_rhs(traj.s[k + 1], traj.i[k + 1], u, params);
    return {hermite_interpolate(h, traj.s[k], traj.s[k + 1], da.ds, db.ds, theta),
            hermite_interpolate(h, traj.i[k], traj.i[k + 1], da.di, db.di, theta)};
}

double phi(double gamma, double s, double i) {
    if (!(s > 0.0)) throw DomainError("phi requires s > 0");
    if (!(gamma > 0.0)) throw DomainError("phi requires gamma > 0");
    return s + i - std::log(s) / gamma;
}

double herd_threshold(const EpidemicParams& params) { return params.nu / params.beta; }

double alpha_bar(const EpidemicParams& params, const EpidemicState& init) {
    const double herd = herd_threshold(params);
    if (!(init.s > herd)) {
        throw PreconditionError("alpha_bar requires S0 > S_herd");
    }
    return herd / (init.s + init.i - herd) * (std::log(init.s) - std::log(herd));
}

}  // namespace lockdown
