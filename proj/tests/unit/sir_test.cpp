#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "lockdown/errors.hpp"
#include "lockdown/sir.hpp"

namespace lockdown {
namespace {

using testing::france;
using testing::france_init;

TEST(EpidemicParams, CreateRejectsSubcriticalAndNonPositiveRates) {
    EXPECT_THROW(EpidemicParams::create(0.1, 0.1), DomainError);
    EXPECT_THROW(EpidemicParams::create(0.05, 0.1), DomainError);
    EXPECT_THROW(EpidemicParams::create(0.0, 0.1), DomainError);
    EXPECT_THROW(EpidemicParams::create(0.3, -0.1), DomainError);
    EXPECT_THROW(EpidemicParams::create(std::nan(""), 0.1), DomainError);
    const auto p = EpidemicParams::create(0.29, 0.1);
    EXPECT_DOUBLE_EQ(p.r0(), 2.9);
    EXPECT_DOUBLE_EQ(p.herd(), 0.1 / 0.29);
}

TEST(EpidemicState, FromFractionsFillsRemovedWithRemainder) {
    const auto s = EpidemicState::from_fractions(0.7, 0.2, 3.0);
    EXPECT_NEAR(s.r, 0.1, 1e-15);
    EXPECT_EQ(s.t, 3.0);
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(france_init().r, 0.0);
}

TEST(EpidemicState, ValidateRejectsBrokenStates) {
    EXPECT_THROW((EpidemicState{0.0, 0.5, 0.5, 0.0}).validate(), DomainError);
    EXPECT_THROW((EpidemicState{0.5, -0.1, 0.6, 0.0}).validate(), DomainError);
    EXPECT_THROW((EpidemicState{0.5, 0.4, 0.2, 0.0}).validate(), DomainError);
}

TEST(PiecewiseControl, ValidatesShape) {
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {1.0}, {1.0}), DomainError);          // first != 0
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {0.0, 5.0, 5.0}, {1, 1, 1}), DomainError);
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {0.0, 11.0}, {1, 1}), DomainError);  // beyond T
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {0.0}, {0.1}), DomainError);         // below alpha
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {0.0}, {1.5}), DomainError);
    EXPECT_THROW(PiecewiseControl(1.0, 10.0, {0.0}, {1.0}), DomainError);
    EXPECT_THROW(PiecewiseControl(0.2, 0.0, {0.0}, {1.0}), DomainError);
    EXPECT_THROW(PiecewiseControl(0.2, 10.0, {0.0, 5.0}, {1.0}), DomainError);
}

TEST(PiecewiseControl, LeftContinuousAndOneAfterHorizon) {
    const PiecewiseControl u(0.2, 10.0, {0.0, 4.0}, {1.0, 0.2});
    EXPECT_EQ(u(0.0), 1.0);
    EXPECT_EQ(u(4.0), 1.0);
    EXPECT_EQ(u(4.0 + 1e-6), 0.2);
    EXPECT_EQ(u(10.0), 0.2);
    EXPECT_EQ(u(10.0 + 1e-6), 1.0);
    const auto sw = u.switch_times();
    ASSERT_EQ(sw.size(), 2u);
    EXPECT_EQ(sw[0], 4.0);
    EXPECT_EQ(sw[1], 10.0);
}

TEST(PiecewiseControl, FromCellsNeedsOneValuePerCell) {
    EXPECT_THROW(PiecewiseControl::from_cells(0.0, 1.0, 0.1, std::vector<double>(9, 1.0)),
                 GridMismatchError);
    const auto u = PiecewiseControl::from_cells(0.0, 1.05, 0.1, std::vector<double>(11, 0.5));
    EXPECT_EQ(u(1.05), 0.5);
    EXPECT_EQ(u.breakpoints().size(), 11u);
}

TEST(BangBangControl, ToPiecewise) {
    const auto u = BangBangControl(30.0, 0.3, 100.0).to_piecewise();
    EXPECT_EQ(u(30.0), 1.0);
    EXPECT_EQ(u(30.5), 0.3);
    EXPECT_EQ(u(100.5), 1.0);
    EXPECT_EQ(BangBangControl(0.0, 0.3, 100.0).to_piecewise()(0.5), 0.3);
    EXPECT_EQ(BangBangControl(100.0, 0.3, 100.0).to_piecewise()(99.5), 1.0);
    EXPECT_THROW(BangBangControl(101.0, 0.3, 100.0), DomainError);
    EXPECT_THROW(BangBangControl(-1.0, 0.3, 100.0), DomainError);
}

TEST(Rk4Step, DiseaseFreeStateIsFixed) {
    const EpidemicState x{0.6, 0.0, 0.4, 0.0};
    for (double u : {0.0, 0.5, 1.0}) {
        for (double dt : {0.01, 1.0, 10.0}) {
            const auto y = rk4_step(x, u, france(), dt);
            EXPECT_EQ(y.s, x.s);
            EXPECT_EQ(y.i, 0.0);
            EXPECT_EQ(y.r, x.r);
            EXPECT_DOUBLE_EQ(y.t, dt);
        }
    }
}

TEST(Rk4Step, TotalLockdownDecaysExponentially) {
    const EpidemicState x{0.5, 0.5, 0.0, 0.0};
    const auto y = rk4_step(x, 0.0, france(), 0.01);
    EXPECT_EQ(y.s, 0.5);
    EXPECT_NEAR(y.i, 0.5 * std::exp(-0.001), 1e-12);
}

TEST(Rk4Step, NonFiniteResultThrows) {
    const EpidemicParams wild{1e306, 1.0};
    EXPECT_THROW(rk4_step({0.5, 0.5, 0.0, 0.0}, 1.0, wild, 10.0), IntegrationError);
}

TEST(Integrate, UncontrolledPeakNearDay62) {
    const auto u = PiecewiseControl::constant(0.0, 200.0, 1.0);
    const auto tr = integrate(france(), france_init(), u, 200.0);
    const auto peak = std::max_element(tr.i.begin(), tr.i.end()) - tr.i.begin();
    EXPECT_NEAR(tr.t[static_cast<std::size_t>(peak)], 62.0, 2.0);
    EXPECT_GT(tr.s.back(), 0.059);
    EXPECT_LT(tr.s.back(), 0.068);
}

TEST(Integrate, NoInfectionMeansNothingHappens) {
    const auto tr = integrate(france(), EpidemicState::from_fractions(0.9, 0.0),
                              PiecewiseControl::constant(0.0, 50.0, 1.0), 50.0);
    for (double s : tr.s) EXPECT_EQ(s, 0.9);
}

TEST(Integrate, OffGridSwitchBecomesANode) {
    const auto u = BangBangControl(10.005, 0.2, 20.003).to_piecewise();
    const auto tr = integrate(france(), france_init(), u, 30.0, 0.01);
    EXPECT_LT(tr.find_node(10.005), tr.size());
    EXPECT_LT(tr.find_node(20.003), tr.size());
    EXPECT_LT(tr.find_node(30.0), tr.size());
    EXPECT_EQ(tr.find_node(10.0055), tr.size());
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
        EXPECT_EQ(tr.u_step[k], u.on_interval(tr.t[k], tr.t[k + 1]));
    }
    EXPECT_EQ(tr.size(), 3001u + 2u);
}

TEST(Integrate, RejectsBadArguments) {
    const auto u = PiecewiseControl::constant(0.0, 10.0, 1.0);
    EXPECT_THROW(integrate(france(), france_init(), u, 10.0, 0.0), DomainError);
    EXPECT_THROW(integrate(france(), france_init(), u, 0.0, 0.01), DomainError);
    EXPECT_THROW(integrate(france(), EpidemicState{0.5, 0.1, 0.1, 0.0}, u, 10.0), DomainError);
}

// Phi_{u R0} is conserved while u is constant, and the total mass never moves.
TEST(Integrate, ConservationMassAndMonotonicity) {
    const auto params = france();
    const PiecewiseControl u(0.1, 150.0, {0.0, 40.0, 70.0, 110.0}, {1.0, 0.4, 0.75, 0.1});
    const auto tr = integrate(params, france_init(), u, 400.0);
    const std::vector<double> edges{0.0, 40.0, 70.0, 110.0, 150.0, 400.0};
    const std::vector<double> level{1.0, 0.4, 0.75, 0.1, 1.0};
    for (std::size_t piece = 0; piece < level.size(); ++piece) {
        const double gamma = level[piece] * params.r0();
        const std::size_t a = tr.find_node(edges[piece]);
        const std::size_t b = tr.find_node(edges[piece + 1]);
        ASSERT_LT(b, tr.size());
        const double ref = phi(gamma, tr.s[a], tr.i[a]);
        double drift = 0.0;
        for (std::size_t k = a; k <= b; ++k) {
            drift = std::max(drift, std::abs(phi(gamma, tr.s[k], tr.i[k]) - ref));
        }
        EXPECT_LE(drift, 1e-6) << "piece " << piece;
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
        EXPECT_LE(std::abs(tr.s[k] + tr.i[k] + tr.r[k] - 1.0), 1e-8);
        EXPECT_GE(tr.i[k], 0.0);
        if (k > 0) {
            EXPECT_LE(tr.s[k], tr.s[k - 1]);
            EXPECT_GE(tr.r[k], tr.r[k - 1]);
        }
    }
}

TEST(Integrate, PhiConservedOver200DaysUncontrolled) {
    const auto params = france();
    const auto tr = integrate(params, france_init(), PiecewiseControl::constant(0.0, 200.0, 1.0), 200.0);
    const double ref = phi(params.r0(), tr.s[0], tr.i[0]);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        ASSERT_LE(std::abs(phi(params.r0(), tr.s[k], tr.i[k]) - ref), 1e-7);
    }
}

// d/dt Phi_gamma = (beta u / gamma - nu) I for any gamma.
TEST(Integrate, PhiDerivativeIdentity) {
    const auto params = france();
    const double gamma = 1.7;
    const double dt = 0.01;
    const auto u = BangBangControl(45.0, 0.3, 90.0).to_piecewise();
    const auto tr = integrate(params, france_init(), u, 120.0, dt);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < tr.size(); k += 7) {
        if (tr.u_step[k - 1] != tr.u_step[k]) continue;
        const double fd = (phi(gamma, tr.s[k + 1], tr.i[k + 1]) - phi(gamma, tr.s[k - 1], tr.i[k - 1])) /
                          (tr.t[k + 1] - tr.t[k - 1]);
        const double exact = (params.beta * tr.u_step[k] / gamma - params.nu) * tr.i[k];
        worst = std::max(worst, std::abs(fd - exact));
    }
    // Central differences are O(dt^2) times a third derivative of size ~1e-3.
    EXPECT_LE(worst, 1e-6);
}

// Endpoint error ratio under dt halving for a fourth-order method is ~16.
TEST(Integrate, FourthOrderConvergence) {
    const auto params = EpidemicParams::create(0.5, 0.1);
    const auto init = EpidemicState::from_fractions(0.99, 0.01);
    const auto u = PiecewiseControl::constant(0.0, 40.0, 1.0);
    const auto reference = integrate(params, init, u, 40.0, 0.001).back();
    auto error = [&](double dt) {
        const auto end = integrate(params, init, u, 40.0, dt).back();
        return std::hypot(end.s - reference.s, end.i - reference.i);
    };
    const double e1 = error(0.5), e2 = error(0.25), e3 = error(0.125);
    EXPECT_GE(e1 / e2, 12.0);
    EXPECT_LE(e1 / e2, 20.0);
    EXPECT_GE(e2 / e3, 12.0);
    EXPECT_LE(e2 / e3, 20.0);
}

TEST(Phi, Values) {
    for (double g : {0.5, 1.0, 2.9}) EXPECT_EQ(phi(g, 1.0, 0.0), 1.0);
    const double r0 = 2.9;
    EXPECT_NEAR(phi(r0, 1.0 / r0, 0.0), (1.0 + std::log(r0)) / r0, 1e-15);
    EXPECT_THROW(phi(2.0, 0.0, 0.1), DomainError);
    EXPECT_THROW(phi(2.0, -0.1, 0.1), DomainError);
    EXPECT_THROW(phi(0.0, 0.5, 0.1), DomainError);
}

TEST(HerdThreshold, Values) {
    EXPECT_NEAR(herd_threshold(france()), 0.3448275862, 1e-10);
    EXPECT_EQ(herd_threshold({2.0, 1.0}), 0.5);
    EXPECT_EQ(herd_threshold({0.3, 0.3}), 1.0);
}

TEST(AlphaBar, MatchesDirectFormula) {
    const double beta = 0.29, nu = 0.1, i0 = 1e3 / 6.7e7, s0 = 1.0 - i0;
    const double herd = nu / beta;
    const double oracle = herd / (s0 + i0 - herd) * (std::log(s0) - std::log(herd));
    EXPECT_NEAR(alpha_bar(france(), france_init()), oracle, 1e-12);
    EXPECT_NEAR(alpha_bar(france(), france_init()), 0.56, 0.01);
}

TEST(AlphaBar, LimitAtHerdThresholdIsFinite) {
    const auto params = france();
    const double herd = params.herd();
    const double s0 = herd * (1.0 + 1e-9);
    const double a = alpha_bar(params, EpidemicState::from_fractions(s0, 1.0 - s0));
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_NEAR(a, std::log(s0 / herd) * herd / (1.0 - herd), 1e-12);
}

TEST(AlphaBar, RequiresSusceptiblesAboveHerd) {
    EXPECT_THROW(alpha_bar(france(), EpidemicState::from_fractions(0.3, 0.1)), PreconditionError);
}

TEST(Hermite, InterpolatesCubicsExactly) {
    auto f = [](double t) { return 1.0 + 2.0 * t - t * t + 0.5 * t * t * t; };
    auto df = [](double t) { return 2.0 - 2.0 * t + 1.5 * t * t; };
    const double a = 0.3, h = 0.7;
    for (double theta : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(hermite_interpolate(h, f(a), f(a + h), df(a), df(a + h), theta), f(a + theta * h),
                    1e-14);
    }
    // int_a^{a+h} f exactly
    auto F = [](double t) { return t + t * t - t * t * t / 3.0 + 0.125 * t * t * t * t; };
    EXPECT_NEAR(hermite_trapezoid(h, f(a), f(a + h), df(a), df(a + h)), F(a + h) - F(a), 1e-14);
}

TEST(InterpolateSi, AgreesWithFinerIntegration) {
    const auto u = PiecewiseControl::constant(0.0, 80.0, 1.0);
    const auto coarse = integrate(france(), france_init(), u, 80.0, 0.1);
    const auto fine = integrate(france(), france_init(), u, 80.0, 0.001);
    const auto x = interpolate_si(coarse, france(), 55.0373);
    const std::size_t k = fine.find_node(55.037);
    const auto y = rk4_step(fine.state(k), 1.0, france(), 0.0003);
    EXPECT_NEAR(x.ds, y.s, 1e-7);
    EXPECT_NEAR(x.di, y.i, 1e-7);
}

}  // namespace
}  // namespace lockdown
