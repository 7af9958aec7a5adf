#pragma once

// Pontryagin machinery for minimizing J_Phi(u) = Phi_R0(S(T), I(T)), which is
// the same as maximizing S_inf(u).
//
// Adjoint system, integrated backward from p_S(T) = p_I(T) = 0:
//   p_S' = beta u I (p_S - p_I)
//   p_I' = beta u S p_S - (beta u S - nu) p_I + nu (u - 1)
//
// The derivative of J_Phi in direction h is int_0^T g h dt with
//   g = (nu - beta S (p_I - p_S)) I = (nu + beta w) I,   w = S (p_S - p_I).
// Since Phi_R0(., 0) is decreasing below S_herd, the S_inf derivative is the
// same integral divided by (1 - S_herd / S_inf) < 0.

#include <span>
#include <string>
#include <vector>

#include "lockdown/sir.hpp"

namespace lockdown {

struct AdjointTrajectory {
    std::vector<double> t;  // trajectory nodes on [0, T]
    std::vector<double> p_s;
    std::vector<double> p_i;

    std::size_t size() const { return t.size(); }
};

// Backward RK4 on the forward grid restricted to [0, control.horizon()].
// Mid-step forward states come from cubic Hermite interpolation of the
// stored (S, I) and their derivatives. Throws GridMismatchError if the
// trajectory was not produced with `control` or does not cover [0, T].
AdjointTrajectory integrate_adjoint(const Trajectory& traj, const PiecewiseControl& control,
                                    const EpidemicParams& params);

// g(t) = (nu - beta S (p_I - p_S)) I on the adjoint nodes.
std::vector<double> gradient_density(const Trajectory& traj, const AdjointTrajectory& adj,
                                     const EpidemicParams& params);

// w(t) = S (p_S - p_I) on the adjoint nodes.
std::vector<double> switching_function(const Trajectory& traj, const AdjointTrajectory& adj);

// int_0^T g h dt for a direction h that is constant on each adjoint step
// (direction.size() == adj.size() - 1).
double j_phi_directional_derivative(const Trajectory& traj, const AdjointTrajectory& adj,
                                    const EpidemicParams& params,
                                    std::span<const double> direction);

// DS_inf(u) . h, via the chain rule through Phi_R0(S_inf, 0) = J_Phi.
double s_infinity_directional_derivative(const Trajectory& traj, const AdjointTrajectory& adj,
                                         const EpidemicParams& params,
                                         std::span<const double> direction);

// Pointwise projection onto [alpha, 1].
PiecewiseControl project(const PiecewiseControl& control);

// int_0^T (u - alpha) dt / (1 - alpha); equals T0 for a bang-bang control.
double effective_switch_time(const PiecewiseControl& control);

// L1 distance on [0, T] between two controls.
double l1_distance(const PiecewiseControl& a, const PiecewiseControl& b, double dt);

struct GradientIterate {
    PiecewiseControl control;
    double objective = 0.0;  // S_inf
    double step = 0.0;
    int iteration = 0;
};

struct GradientRecord {
    int iteration = 0;
    double objective = 0.0;
    double step = 0.0;
    double switch_time = 0.0;  // effective_switch_time of the iterate
};

struct GradientOptions {
    double dt = kDefaultDt;
    double tol = 1e-9;  // stop once the S_inf gain of a step is <= tol
    int max_iters = 5000;
    double min_step = 1e-12;
};

struct GradientResult {
    GradientIterate final;
    std::vector<GradientRecord> history;  // iteration 0 is the projected start
    bool converged = false;
    std::string stop_reason;
};

// Projected gradient ascent on S_inf over controls with one value per dt
// cell. The search direction is the J_Phi gradient density normalized to unit
// sup-norm; steps backtrack from rho = 1 by halving until S_inf increases.
GradientResult projected_gradient(const EpidemicParams& params, const EpidemicState& init,
                                  const PiecewiseControl& u0, const GradientOptions& options = {});

}  // namespace lockdown
