#pragma once

#include "lockdown/switching.hpp"

namespace lockdown {

struct MinTimeReport {
    double t_star = 0.0;             // minimal intervention length, days
    double epsilon = 0.0;            // target gap below S_herd
    double t0_star_at_t_star = 0.0;  // optimal switch for T = t_star
    double s_inf_achieved = 0.0;     // S_inf* at T = t_star
    double bracket_width = 0.0;
    int iterations = 0;
};

struct MinTimeOptions {
    double tol_T = 0.1;            // days
    double tol_t = kDefaultTolT;   // inner switch-time tolerance
    double initial_upper = 100.0;  // first T_hi probe, doubled until feasible
    double max_upper = 1e4;
};

// S_inf*(alpha, T): value of the optimal bang-bang policy for horizon T
// (T = 0 means no intervention at all).
double optimal_value(const SwitchProblem& problem, double horizon, double tol_t = kDefaultTolT);

// Smallest T with S_inf*(alpha, T) >= S_herd - epsilon, by bisection on the
// nondecreasing map T -> S_inf*(alpha, T). problem.horizon is ignored.
// Requires alpha <= alpha_bar and 0 < epsilon < S_herd; throws
// UnreachableTargetError when alpha > alpha_bar or no T <= max_upper works.
MinTimeReport minimal_time(const SwitchProblem& problem, double epsilon,
                           const MinTimeOptions& options = {});

}  // namespace lockdown
