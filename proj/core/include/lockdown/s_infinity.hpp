#pragma once

// Asymptotic susceptible fraction S_inf.
//
// Once the control is back to 1 (t >= T), Phi_R0 is conserved, so S_inf is the
// smallest root of Phi_R0(x, 0) = Phi_R0(S(T), I(T)). No long-horizon
// integration is needed.

#include "lockdown/sir.hpp"

namespace lockdown {

// Bracket handed to the bisection solver.
struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    double tol = 1e-12;  // stop width; 0 runs to adjacent doubles
};

// Lower end of every S_inf bracket; Phi(., 0) -> +inf as S -> 0+.
inline constexpr double kSInfBracketFloor = 1e-14;

// Smallest root x of Phi_gamma(x, 0) = level on the decreasing branch
// (0, upper]. Throws BracketError when Phi_gamma(upper, 0) > level.
double smallest_phi_root(double gamma, double level, RootBracket bracket);

// Smallest root in (0, S_herd] of Phi_R0(x, 0) = Phi_R0(s_T, i_T).
double s_infinity_from_state(const EpidemicParams& params, double s_T, double i_T);

// Integrates on [0, T] and applies s_infinity_from_state to the end state.
double s_infinity_of_control(const EpidemicParams& params, const EpidemicState& init,
                             const PiecewiseControl& control, double dt = kDefaultDt);

// S_inf for the infinite-horizon constant control u = alpha. alpha = 0 keeps S
// frozen at S0.
double s_infinity_constant_alpha(const EpidemicParams& params, const EpidemicState& init,
                                 double alpha);

}  // namespace lockdown
