#include "lockdown/min_time.hpp"

#include <string>

#include "lockdown/errors.hpp"
#include "lockdown/s_infinity.hpp"

namespace lockdown {

double optimal_value(const SwitchProblem& problem, double horizon, double tol_t) {
    if (horizon <= 0.0) {
        return s_infinity_from_state(problem.params, problem.init.s, problem.init.i);
    }
    return optimal_switch(problem.with_horizon(horizon), tol_t).s_inf_star;
}

MinTimeReport minimal_time(const SwitchProblem& problem, double epsilon,
                           const MinTimeOptions& options) {
    problem.params.validate();
    problem.init.validate();
    if (!(problem.init.i > 0.0)) throw DomainError("I0 must be positive");
    if (!(options.tol_T > 0.0)) throw DomainError("tol_T must be positive");

    const double herd = herd_threshold(problem.params);
    if (!(epsilon > 0.0 && epsilon < herd)) {
        throw DomainError("epsilon must lie in (0, S_herd)");
    }
    const double cap = alpha_bar(problem.params, problem.init);
    if (problem.alpha > cap) {
        throw UnreachableTargetError("alpha = " + std::to_string(problem.alpha) +
                                     " exceeds alpha_bar = " + std::to_string(cap) +
                                     "; S_herd - epsilon cannot be reached");
    }

    const double target = herd - epsilon;
    MinTimeReport report;
    report.epsilon = epsilon;

    const double free_value = optimal_value(problem, 0.0, options.tol_t);
    if (free_value >= target) {
        report.s_inf_achieved = free_value;
        return report;
    }

    double lo = 0.0;
    double hi = options.initial_upper;
    double hi_value = optimal_value(problem, hi, options.tol_t);
    while (hi_value < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > options.max_upper) {
            throw UnreachableTargetError("no horizon up to " + std::to_string(options.max_upper) +
                                         " days reaches S_herd - epsilon");
        }
        hi_value = optimal_value(problem, hi, options.tol_t);
        ++report.iterations;
    }

    while (hi - lo > options.tol_T) {
        const double mid = 0.5 * (lo + hi);
        if (optimal_value(problem, mid, options.tol_t) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
        ++report.iterations;
    }

    const auto at_hi = optimal_switch(problem.with_horizon(hi), options.tol_t);
    report.t_star = hi;
    report.t0_star_at_t_star = at_hi.t0_star;
    report.s_inf_achieved = at_hi.s_inf_star;
    report.bracket_width = hi - lo;
    return report;
}

}  // namespace lockdown
