#include "lockdown/s_infinity.hpp"

#include <algorithm>
#include <cmath>

#include "lockdown/errors.hpp"

namespace lockdown {

double smallest_phi_root(double gamma, double level, RootBracket bracket) {
    double lo = bracket.lo;
    double hi = bracket.hi;
    const double f_hi = phi(gamma, hi, 0.0) - level;
    if (f_hi > 0.0) {
        throw BracketError("no sign change on the decreasing branch of Phi");
    }
    if (f_hi == 0.0) return hi;
    if (phi(gamma, lo, 0.0) - level < 0.0) {
        throw BracketError("Phi at the bracket floor is below the target level");
    }
    // Phi(., 0) is decreasing on the bracket: f(lo) >= 0 >= f(hi).
    while (hi - lo > bracket.tol || bracket.tol <= 0.0) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(gamma, mid, 0.0) - level > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double s_infinity_from_state(const EpidemicParams& params, double s_T, double i_T) {
    if (!(s_T > 0.0)) throw DomainError("S(T) must be positive");
    if (!(i_T >= 0.0)) throw DomainError("I(T) must be nonnegative");

    const double r0 = params.r0();
    const double herd = herd_threshold(params);
    if (i_T == 0.0 && s_T <= herd) return s_T;

    const double level = phi(r0, s_T, i_T);
    const double minimum = phi(r0, herd, 0.0);
    if (level - minimum <= 1e-12) return herd;

    return smallest_phi_root(r0, level, {kSInfBracketFloor, herd, 0.0});
}

double s_infinity_of_control(const EpidemicParams& params, const EpidemicState& init,
                             const PiecewiseControl& control, double dt) {
    const Trajectory traj = integrate(params, init, control, control.horizon(), dt);
    return s_infinity_from_state(params, traj.s.back(), traj.i.back());
}

double s_infinity_constant_alpha(const EpidemicParams& params, const EpidemicState& init,
                                 double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    init.validate();
    if (alpha == 0.0) return init.s;

    const double gamma = alpha * params.r0();
    const double level = phi(gamma, init.s, init.i);
    const double upper = std::min(herd_threshold(params) / alpha, init.s);
    if (level - phi(gamma, upper, 0.0) <= 1e-14) return upper;
    return smallest_phi_root(gamma, level, {kSInfBracketFloor, upper, 0.0});
}

}  // namespace lockdown
