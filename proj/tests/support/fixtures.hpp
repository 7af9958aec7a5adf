#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lockdown/adjoint.hpp"
#include "lockdown/s_infinity.hpp"
#include "lockdown/sir.hpp"
#include "lockdown/switching.hpp"

namespace lockdown::testing {

inline constexpr double kPopulation = 6.7e7;

// France, March-May 2020.
inline EpidemicParams france() { return EpidemicParams::create(0.29, 0.1); }

inline EpidemicState france_init() {
    const double i0 = 1e3 / kPopulation;
    return EpidemicState::from_fractions(1.0 - i0, i0);
}

inline SwitchProblem france_problem(double alpha, double horizon, double dt = kDefaultDt) {
    return {france(), france_init(), alpha, horizon, dt};
}

// Brute force argmax of j over t0 = 0, step, 2 step, ... . Every t0 shares
// the uncontrolled prefix, so the free run is stepped once and each candidate
// only integrates its lockdown window. `step` must be a multiple of p.dt.
inline double grid_argmax_j(const SwitchProblem& p, double step) {
    const auto stride = static_cast<long>(std::llround(step / p.dt));
    const auto full = static_cast<long>(std::floor(p.horizon / p.dt + 1e-9));
    const double tail = p.horizon - static_cast<double>(full) * p.dt;

    auto finish = [&](EpidemicState x, long from, double u) {
        for (long k = from; k < full; ++k) x = rk4_step(x, u, p.params, p.dt);
        if (tail > 1e-9) x = rk4_step(x, u, p.params, tail);
        return s_infinity_from_state(p.params, x.s, x.i);
    };

    double best_t = 0.0;
    double best = -1.0;
    EpidemicState free = p.init;
    for (long k = 0; k <= full; ++k) {
        if (k % stride == 0) {
            const double v = finish(free, k, p.alpha);
            if (v > best) {
                best = v;
                best_t = static_cast<double>(k) * p.dt;
            }
        }
        if (k < full) free = rk4_step(free, 1.0, p.params, p.dt);
    }
    return best_t;
}

// Smooth bump supported on [a, b], sampled at cell midpoints.
inline std::vector<double> bump_direction(double a, double b, double dt, std::size_t cells) {
    std::vector<double> h(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
        const double t = (static_cast<double>(k) + 0.5) * dt;
        if (t > a && t < b) {
            const double x = (t - a) / (b - a);
            h[k] = std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * x);
        }
    }
    return h;
}

}  // namespace lockdown::testing
