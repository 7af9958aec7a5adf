#pragma once

// Controlled SIR dynamics
//
//   S' = -u beta S I
//   I' =  u beta S I - nu I
//   R' =  nu I
//
// with a transmission-reduction control u(t) in [alpha, 1] on the intervention
// window [0, T] and u = 1 afterwards. All compartments are population
// fractions.

#include <cstddef>
#include <vector>

namespace lockdown {

inline constexpr double kDefaultDt = 0.01;  // days

struct EpidemicParams {
    double beta = 0.0;  // transmission rate, 1/day
    double nu = 0.0;    // removal rate, 1/day

    // Validating factory: beta > 0, nu > 0 and R0 = beta/nu > 1.
    static EpidemicParams create(double beta, double nu);

    double r0() const { return beta / nu; }
    double herd() const { return nu / beta; }

    // Throws DomainError when the invariants above do not hold.
    void validate() const;
};

struct EpidemicState {
    double s = 1.0;
    double i = 0.0;
    double r = 0.0;
    double t = 0.0;

    // Builds a state from fractions of susceptible and infected; r takes the
    // remainder.
    static EpidemicState from_fractions(double s, double i, double t = 0.0);

    // s > 0, i >= 0, r >= 0 and |s + i + r - 1| <= 1e-9.
    void validate() const;
};

// Piecewise-constant admissible control on [0, T], equal to 1 after T.
//
// values[k] applies on (breakpoints[k], breakpoints[k+1]] with the last piece
// ending at horizon; the value at t = 0 is values[0].
class PiecewiseControl {
public:
    PiecewiseControl(double alpha, double horizon, std::vector<double> breakpoints,
                     std::vector<double> values);

    static PiecewiseControl constant(double alpha, double horizon, double value);

    // One value per cell [k dt, (k+1) dt] on [0, horizon]; the last cell may be
    // shorter when horizon is not a multiple of dt.
    static PiecewiseControl from_cells(double alpha, double horizon, double dt,
                                       std::vector<double> cell_values);

    double alpha() const { return alpha_; }
    double horizon() const { return horizon_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    // Left-continuous evaluation; 1 for t > horizon.
    double operator()(double t) const;

    // Value on the open interval (a, b); the interval must not straddle a
    // breakpoint.
    double on_interval(double a, double b) const { return (*this)(0.5 * (a + b)); }

    // Interior switch times in (0, horizon) plus the horizon itself.
    std::vector<double> switch_times() const;

private:
    double alpha_;
    double horizon_;
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// u = 1 on [0, t0], alpha on (t0, T], 1 after T.
struct BangBangControl {
    double t0 = 0.0;
    double alpha = 0.0;
    double horizon = 0.0;

    BangBangControl(double t0, double alpha, double horizon);

    PiecewiseControl to_piecewise() const;
};

// Sampled solution. Nodes are the uniform grid k*dt on [0, t_end] plus every
// control switch time that does not already coincide with a node, so the
// control is constant on each step.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> i;
    std::vector<double> r;
    std::vector<double> u;       // left-continuous control sample at each node
    std::vector<double> u_step;  // control on step [t[k], t[k+1]]; size() == t.size() - 1
    double dt = kDefaultDt;

    std::size_t size() const { return t.size(); }
    EpidemicState state(std::size_t k) const { return {s[k], i[k], r[k], t[k]}; }
    EpidemicState back() const { return state(size() - 1); }

    // Index of the node at time `time`, or size() if there is none (within 1e-9).
    std::size_t find_node(double time) const;
};

// Tolerance used to decide that two times denote the same grid node.
inline constexpr double kNodeTol = 1e-9;

// One classical RK4 step with u held constant. Throws IntegrationError if the
// result is not finite.
EpidemicState rk4_step(const EpidemicState& state, double u, const EpidemicParams& params,
                       double dt);

// Integrates from init.t = 0 to t_end. Throws IntegrationError on a
// non-finite state.
Trajectory integrate(const EpidemicParams& params, const EpidemicState& init,
                     const PiecewiseControl& control, double t_end, double dt = kDefaultDt);

// Phi_gamma(S, I) = S + I - ln(S)/gamma. Conserved along trajectories where
// u is constant and gamma = u R0.
double phi(double gamma, double s, double i);

// nu / beta. Does not validate, so beta == nu yields 1.
double herd_threshold(const EpidemicParams& params);

// Largest constant lockdown intensity for which S can be stopped arbitrarily
// close to S_herd:
//   alpha_bar = S_herd / (S0 + I0 - S_herd) * (ln S0 - ln S_herd).
// Requires S0 > S_herd.
double alpha_bar(const EpidemicParams& params, const EpidemicState& init);

// Right-hand side (S', I') for a constant control.
struct Derivative {
    double ds;
    double di;
};
inline Derivative sir_rhs(double s, double i, double u, const EpidemicParams& p) {
    const double infection = u * p.beta * s * i;
    return {-infection, infection - p.nu * i};
}

// Corrected trapezoid rule on one step: exact for cubics, uses endpoint
// values and derivatives.
inline double hermite_trapezoid(double h, double fa, double fb, double dfa, double dfb) {
    return 0.5 * h * (fa + fb) + h * h / 12.0 * (dfa - dfb);
}

// Cubic Hermite interpolant on a step of length h at fraction theta in [0, 1].
inline double hermite_interpolate(double h, double ya, double yb, double dya, double dyb,
                                  double theta) {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + theta) * h * dya +
           (-2 * t3 + 3 * t2) * yb + (t3 - t2) * h * dyb;
}

// (S, I) at an arbitrary time inside the trajectory, by cubic Hermite
// interpolation using the step control for the derivatives.
Derivative interpolate_si(const Trajectory& traj, const EpidemicParams& params, double time);

}  // namespace lockdown
