#include "lockdown/switching.hpp"

#include <cmath>
#include <string>

#include "lockdown/errors.hpp"
#include "lockdown/s_infinity.hpp"

namespace lockdown {

namespace {

// Below this I(t) the psi quadrature is meaningless.
constexpr double kUnderflowFloor = 1e-280;

void require_switch_time(const SwitchProblem& problem, double t0) {
    if (!(t0 >= 0.0 && t0 <= problem.horizon)) {
        throw DomainError("switch time " + std::to_string(t0) + " outside [0, T]");
    }
}

void require_positive_alpha(const SwitchProblem& problem) {
    if (!(problem.alpha > 0.0 && problem.alpha < 1.0)) {
        throw DomainError("this route needs alpha in (0, 1); use the alpha = 0 branch");
    }
}

std::size_t node_of(const Trajectory& traj, double time) {
    const std::size_t k = traj.find_node(time);
    if (k == traj.size()) throw GridMismatchError("time is not a trajectory node");
    return k;
}

// int_{t[from]}^{t[to]} f(S, I) dt with the corrected trapezoid rule. `f`
// returns {value, time derivative} given (S, I, S', I').
template <typename F>
double integrate_along(const Trajectory& traj, const EpidemicParams& params, std::size_t from,
                       std::size_t to, F&& f) {
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) {
        if (traj.i[k] < kUnderflowFloor || traj.i[k + 1] < kUnderflowFloor) {
            throw UnderflowError("I(t) underflows on the lockdown window; shorten T or use j_Phi");
        }
        const double u = traj.u_step[k];
        const auto da = sir_rhs(traj.s[k], traj.i[k], u, params);
        const auto db = sir_rhs(traj.s[k + 1], traj.i[k + 1], u, params);
        const auto [fa, dfa] = f(traj.s[k], traj.i[k], da.ds, da.di);
        const auto [fb, dfb] = f(traj.s[k + 1], traj.i[k + 1], db.ds, db.di);
        sum += hermite_trapezoid(traj.t[k + 1] - traj.t[k], fa, fb, dfa, dfb);
    }
    if (!std::isfinite(sum)) throw UnderflowError("psi quadrature is not finite");
    return sum;
}

struct ValueAndRate {
    double value;
    double rate;
};

ValueAndRate s_over_i(double s, double i, double ds, double di) {
    return {s / i, (ds * i - s * di) / (i * i)};
}

ValueAndRate inverse_i(double, double i, double, double di) { return {1.0 / i, -di / (i * i)}; }

// psi(0) is informational for the routes that do not need it; NaN when I
// underflows.
double psi_at_zero_or_nan(const SwitchProblem& problem) {
    try {
        return psi(problem, 0.0);
    } catch (const UnderflowError&) {
        return std::nan("");
    }
}

}  // namespace

void SwitchProblem::validate() const {
    params.validate();
    init.validate();
    if (!(init.i > 0.0)) throw DomainError("I0 must be positive: there is no epidemic to control");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("T must be positive");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
}

SwitchProblem SwitchProblem::with_alpha(double a) const {
    SwitchProblem p = *this;
    p.alpha = a;
    return p;
}

SwitchProblem SwitchProblem::with_horizon(double T) const {
    SwitchProblem p = *this;
    p.horizon = T;
    return p;
}

std::string_view to_string(SwitchMethod method) {
    switch (method) {
        case SwitchMethod::PsiRoot: return "psi-root";
        case SwitchMethod::Trisection: return "trisection";
        case SwitchMethod::AlphaZeroBranch: return "alpha-zero-branch";
    }
    return "unknown";
}

Trajectory bang_bang_trajectory(const SwitchProblem& problem, double t0, double t_end) {
    require_switch_time(problem, t0);
    const BangBangControl control(t0, problem.alpha, problem.horizon);
    return integrate(problem.params, problem.init, control.to_piecewise(), t_end, problem.dt);
}

double j_value(const SwitchProblem& problem, double t0) {
    require_switch_time(problem, t0);
    const BangBangControl control(t0, problem.alpha, problem.horizon);
    return s_infinity_of_control(problem.params, problem.init, control.to_piecewise(), problem.dt);
}

double j_phi(const SwitchProblem& problem, double t0) {
    const Trajectory traj = bang_bang_trajectory(problem, t0, problem.horizon);
    return phi(problem.params.r0(), traj.s.back(), traj.i.back());
}

double j_phi_closed_form(const SwitchProblem& problem, double t0) {
    require_positive_alpha(problem);
    const Trajectory traj = bang_bang_trajectory(problem, t0, problem.horizon);
    const auto& p = problem.params;
    const double c0 = phi(p.r0(), problem.init.s, problem.init.i);
    const double s_switch = traj.s[node_of(traj, t0)];
    return c0 + p.nu / p.beta * (1.0 / problem.alpha - 1.0) * std::log(traj.s.back() / s_switch);
}

double psi(const SwitchProblem& problem, double t0) {
    if (!(problem.alpha >= 0.0 && problem.alpha < 1.0)) {
        throw DomainError("alpha must lie in [0, 1)");
    }
    if (!(problem.init.i > 0.0)) throw DomainError("psi requires I0 > 0");
    const Trajectory traj = bang_bang_trajectory(problem, t0, problem.horizon);
    const std::size_t k0 = node_of(traj, t0);
    const double integral = integrate_along(traj, problem.params, k0, traj.size() - 1, s_over_i);
    return (1.0 - problem.alpha) * problem.params.beta * traj.i.back() * integral - 1.0;
}

double psi_rescaled(const SwitchProblem& problem, double t0) {
    require_positive_alpha(problem);
    if (!(problem.init.i > 0.0)) throw DomainError("psi requires I0 > 0");
    const Trajectory traj = bang_bang_trajectory(problem, t0, problem.horizon);
    const std::size_t k0 = node_of(traj, t0);
    const double integral = integrate_along(traj, problem.params, k0, traj.size() - 1, inverse_i);
    const double a = problem.alpha;
    const double i_end = traj.i.back();
    return (1.0 / a - 1.0) *
           (i_end / traj.i[k0] + problem.params.nu * i_end * integral - 1.0 / (1.0 - a));
}

SwitchSolveReport optimal_t0(const SwitchProblem& problem, double tol_t) {
    problem.validate();
    require_positive_alpha(problem);
    if (!(tol_t > 0.0)) throw DomainError("tol_t must be positive");

    SwitchSolveReport report;
    report.method = SwitchMethod::PsiRoot;
    report.psi_at_zero = psi(problem, 0.0);
    if (report.psi_at_zero <= 0.0) {
        report.t0_star = 0.0;
        report.s_inf_star = j_value(problem, 0.0);
        return report;
    }

    // psi is strictly decreasing with psi(T) = -1.
    double lo = 0.0;
    double hi = problem.horizon;
    while (hi - lo > tol_t) {
        const double mid = 0.5 * (lo + hi);
        if (psi(problem, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++report.iterations;
    }
    report.t0_star = 0.5 * (lo + hi);
    report.residual = std::abs(psi(problem, report.t0_star));
    report.s_inf_star = j_value(problem, report.t0_star);
    return report;
}

double alpha_zero_threshold(const EpidemicParams& params, const EpidemicState& init) {
    const double herd = herd_threshold(params);
    if (!(init.s > herd)) throw PreconditionError("threshold requires S0 > S_herd");
    return std::log(init.s / (init.s - herd)) / params.nu;
}

SwitchSolveReport optimal_t0_alpha_zero(const SwitchProblem& problem, double tol_t) {
    const SwitchProblem zero = problem.with_alpha(0.0);
    zero.validate();
    if (!(tol_t > 0.0)) throw DomainError("tol_t must be positive");

    SwitchSolveReport report;
    report.method = SwitchMethod::AlphaZeroBranch;
    report.psi_at_zero = psi_at_zero_or_nan(zero);

    const auto& p = zero.params;
    const double herd = herd_threshold(p);
    const double T = zero.horizon;
    if (zero.init.s <= herd || T <= alpha_zero_threshold(p, zero.init)) {
        report.t0_star = 0.0;
        report.s_inf_star = j_value(zero, 0.0);
        return report;
    }

    // Uncontrolled solution; S(t0) is read off it by Hermite interpolation.
    const Trajectory free_run =
        integrate(p, zero.init, PiecewiseControl::constant(0.0, T, 1.0), T, zero.dt);
    auto crossing = [&](double t0) {
        return interpolate_si(free_run, p, t0).ds - herd / (1.0 - std::exp(p.nu * (t0 - T)));
    };

    // crossing(0) > 0 above the threshold and -> -inf as t0 -> T.
    double lo = 0.0;
    double hi = T;
    while (hi - lo > tol_t) {
        const double mid = 0.5 * (lo + hi);
        if (crossing(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++report.iterations;
    }
    report.t0_star = 0.5 * (lo + hi);
    report.residual = std::abs(crossing(report.t0_star));
    report.s_inf_star = j_value(zero, report.t0_star);
    return report;
}

SwitchSolveReport optimal_switch(const SwitchProblem& problem, double tol_t) {
    if (problem.alpha == 0.0) return optimal_t0_alpha_zero(problem, tol_t);
    return optimal_t0(problem, tol_t);
}

SwitchSolveReport trisection_t0(const SwitchProblem& problem, int k, double min_width) {
    problem.validate();
    if (k < 0) throw DomainError("iteration count must be nonnegative");

    SwitchSolveReport report;
    report.method = SwitchMethod::Trisection;
    report.psi_at_zero = psi_at_zero_or_nan(problem);

    double lo = 0.0;
    double hi = problem.horizon;
    for (int it = 0; it < k; ++it) {
        if (min_width > 0.0 && hi - lo < min_width) break;
        const double left = lo + (hi - lo) / 3.0;
        const double right = lo + 2.0 * (hi - lo) / 3.0;
        // j_Phi decreases then increases; drop the third that cannot hold the minimum.
        if (j_phi(problem, left) >= j_phi(problem, right)) {
            lo = left;
        } else {
            hi = right;
        }
        ++report.iterations;
    }
    report.t0_star = 0.5 * (lo + hi);
    report.residual = hi - lo;
    report.s_inf_star = j_value(problem, report.t0_star);
    return report;
}

double sensitivity_s_hat(const SwitchProblem& problem, double t0, double t) {
    if (!(problem.alpha >= 0.0 && problem.alpha < 1.0)) {
        throw DomainError("alpha must lie in [0, 1)");
    }
    require_switch_time(problem, t0);
    if (!(t >= t0 && t <= problem.horizon)) throw DomainError("need T0 <= t <= T");

    const auto& p = problem.params;
    if (t <= 0.0) return -p.beta * problem.init.s * problem.init.i;

    const Trajectory traj = bang_bang_trajectory(problem, t0, t);
    const std::size_t k0 = node_of(traj, t0);
    if (std::abs(t - t0) <= kNodeTol) {
        return -p.beta * traj.s[k0] * traj.i[k0];
    }
    const std::size_t k1 = traj.size() - 1;
    const double integral = integrate_along(traj, p, k0, k1, inverse_i);
    return (problem.alpha - 1.0) * p.beta * traj.s[k1] * traj.i[k1] *
           (1.0 + p.nu * traj.i[k0] * integral);
}

}  // namespace lockdown
