#pragma once

// Optimal single-switch lockdown.
//
// The optimal control is bang-bang: u = 1 on [0, T0*], alpha on (T0*, T].
// T0* is found three ways:
//   * root of the decreasing switching condition psi (alpha in (0, 1)),
//   * the closed-form crossing condition S(T0) = S_herd / (1 - exp(nu (T0 - T)))
//     when alpha = 0,
//   * interval-thirds reduction on j_Phi(T0) = Phi_R0(S(T), I(T)).

#include <string_view>

#include "lockdown/sir.hpp"

namespace lockdown {

struct SwitchProblem {
    EpidemicParams params;
    EpidemicState init;
    double alpha = 0.0;
    double horizon = 0.0;  // T, days
    double dt = kDefaultDt;

    // Params valid, I0 > 0, alpha in [0, 1), T > 0, dt > 0.
    void validate() const;

    // The same problem with a different lockdown level or horizon.
    SwitchProblem with_alpha(double a) const;
    SwitchProblem with_horizon(double T) const;
};

enum class SwitchMethod { PsiRoot, Trisection, AlphaZeroBranch };

std::string_view to_string(SwitchMethod method);

struct SwitchSolveReport {
    double t0_star = 0.0;
    double s_inf_star = 0.0;
    double psi_at_zero = 0.0;
    SwitchMethod method = SwitchMethod::PsiRoot;
    int iterations = 0;
    double residual = 0.0;
};

inline constexpr double kDefaultTolT = 1e-3;    // days
inline constexpr int kDefaultTrisectionIters = 60;

// Trajectory of the bang-bang control with switch t0, on [0, t_end].
Trajectory bang_bang_trajectory(const SwitchProblem& problem, double t0, double t_end);

// j(T0) = S_inf(u_T0).
double j_value(const SwitchProblem& problem, double t0);

// j_Phi(T0) = Phi_R0(S(T), I(T)); minimized exactly where j is maximized.
double j_phi(const SwitchProblem& problem, double t0);

// j_Phi(T0) = c0 + (nu/beta)(1/alpha - 1) ln(S(T)/S(T0)), c0 = Phi_R0(S0, I0).
// Requires alpha in (0, 1).
double j_phi_closed_form(const SwitchProblem& problem, double t0);

// psi(T0) = (1 - alpha) beta I(T) int_{T0}^{T} S/I dt - 1.
// Throws UnderflowError if I collapses on [T0, T].
double psi(const SwitchProblem& problem, double t0);

// Equivalent form
//   (1/alpha - 1)(I(T)/I(T0) + nu int_{T0}^{T} I(T)/I ds - 1/(1 - alpha)),
// requires alpha in (0, 1).
double psi_rescaled(const SwitchProblem& problem, double t0);

// T0* = 0 if psi(0) <= 0, otherwise the bisection root of psi to |dT0| <= tol_t.
// Rejects alpha = 0; use optimal_t0_alpha_zero.
SwitchSolveReport optimal_t0(const SwitchProblem& problem, double tol_t = kDefaultTolT);

// (1/nu) ln(S0 / (S0 - S_herd)): below this horizon a total lockdown should
// start at once.
double alpha_zero_threshold(const EpidemicParams& params, const EpidemicState& init);

// alpha = 0 branch (problem.alpha is ignored).
SwitchSolveReport optimal_t0_alpha_zero(const SwitchProblem& problem,
                                        double tol_t = kDefaultTolT);

// Dispatches to optimal_t0 or optimal_t0_alpha_zero.
SwitchSolveReport optimal_switch(const SwitchProblem& problem, double tol_t = kDefaultTolT);

// k rounds of interval thirds on j_Phi over [0, T]; returns the midpoint of
// the final interval. Stops early once the interval is narrower than
// min_width (0 disables). residual holds the final interval width.
SwitchSolveReport trisection_t0(const SwitchProblem& problem, int k = kDefaultTrisectionIters,
                                double min_width = 0.0);

// dS(t)/dT0 for t in [T0, T]:
//   (alpha - 1) beta S(t) I(t) (1 + nu I(T0) int_{T0}^{t} ds/I(s)),
// and -beta S(T0) I(T0) at t = T0.
double sensitivity_s_hat(const SwitchProblem& problem, double t0, double t);

}  // namespace lockdown
