#include "kapitza/errors.hpp"
#include "kapitza/integrate.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

using namespace kapitza;

namespace {

// Linearization of the averaged field at the vertical equilibrium.
Mat2 linear_monodromy(double mu, double a) {
    Mat2 j;
    j << 0.0, 1.0, 1.0 - a * a / 2.0, -mu;
    return (kTwoPi * j).exp();
}

} // namespace

TEST(IntegratorConfig, Validation) {
    IntegratorConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.rel_tol = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = IntegratorConfig{};
    cfg.max_step = -1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = IntegratorConfig{};
    cfg.max_steps = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
    EXPECT_EQ(IntegratorConfig::scan().rel_tol, 1e-8);
    EXPECT_EQ(IntegratorConfig::refinement().abs_tol, 1e-10);
}

TEST(Flow, EquilibriumIsPreserved) {
    // sin(kPi) is 1.2e-16, not 0, so the equilibrium drifts at rounding level.
    for (Field field : {Field::averaged, Field::original}) {
        const auto r = flow(State{kPi, 0.0, 0.0}, 7.3, field, Params{1.0, 2.0, 0.02},
                            Forcing::zero(), IntegratorConfig{});
        EXPECT_NEAR(r.final_state.phi, kPi, 1e-14);
        EXPECT_NEAR(r.final_state.p, 0.0, 1e-14);
        EXPECT_NEAR(r.final_state.t, 7.3, 1e-14);
    }
    const auto fixed = flow_fixed(State{kPi, 0.0, 0.0}, kTwoPi, 17, Field::averaged,
                                  Params{1.0, 2.0}, Forcing::zero());
    EXPECT_NEAR(fixed.final_state.phi, kPi, 1e-14);
    EXPECT_NEAR(fixed.final_state.p, 0.0, 1e-14);
}

TEST(Flow, ZeroDurationGivesIdentity) {
    const auto r = flow(State{2.0, 0.3, 1.0}, 0.0, Field::averaged, Params{1.0, 2.0},
                        Forcing::zero(), IntegratorConfig{}, true);
    ASSERT_TRUE(r.variational.has_value());
    EXPECT_TRUE(r.variational->isIdentity(0.0));
    EXPECT_EQ(r.final_state.phi, 2.0);
}

TEST(Flow, VerticalEquilibriumMultipliers) {
    const auto r = flow(State{kPi, 0.0, 0.0}, kTwoPi, Field::averaged, Params{1.0, 2.0},
                        Forcing::zero(), IntegratorConfig{}, true);
    const Eigen::Vector2cd ev = r.variational->eigenvalues();
    EXPECT_NEAR(std::abs(ev[0]), std::exp(-kPi), 1e-9);
    EXPECT_NEAR(std::abs(ev[1]), std::exp(-kPi), 1e-9);
    EXPECT_NEAR((*r.variational - linear_monodromy(1.0, 2.0)).norm(), 0.0, 1e-9);
}

TEST(Flow, AbelIdentity) {
    for (double mu : {0.0, 0.1, 1.0, 3.0}) {
        const Params params{mu, 1.7};
        const auto r = flow(State{2.6, 0.2, 0.0}, kTwoPi, Field::averaged, params,
                            Forcing::harmonic(0.3, 0.5), IntegratorConfig{}, true);
        const double expected = std::exp(-kTwoPi * mu);
        EXPECT_NEAR(r.variational->determinant() / expected, 1.0, 1e-6) << "mu=" << mu;
    }
}

TEST(Flow, VariationalMatchesFiniteDifferences) {
    const Params params{0.4, 2.2, 0.05};
    const Forcing f = Forcing::harmonic(0.2);
    const IntegratorConfig cfg = IntegratorConfig::with_tolerance(1e-12);
    for (Field field : {Field::averaged, Field::original}) {
        const State s0{2.8, 0.1, 0.0};
        const auto base = flow(s0, kTwoPi, field, params, f, cfg, true);
        const double h = 1e-7;
        for (int col = 0; col < 2; ++col) {
            State plus = s0, minus = s0;
            (col == 0 ? plus.phi : plus.p) += h;
            (col == 0 ? minus.phi : minus.p) -= h;
            const auto rp = flow(plus, kTwoPi, field, params, f, cfg).final_state;
            const auto rm = flow(minus, kTwoPi, field, params, f, cfg).final_state;
            EXPECT_NEAR((*base.variational)(0, col), (rp.phi - rm.phi) / (2 * h), 1e-5);
            EXPECT_NEAR((*base.variational)(1, col), (rp.p - rm.p) / (2 * h), 1e-5);
        }
    }
}

TEST(Flow, SampleTimesAreHitExactly) {
    const std::vector<double> times{0.5, 1.0, 3.0, kTwoPi};
    const auto r = flow(State{3.0, 0.0, 0.0}, kTwoPi, Field::averaged, Params{1.0, 2.0},
                        Forcing::zero(), IntegratorConfig{}, false, times);
    ASSERT_EQ(r.dense_samples.size(), times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        EXPECT_EQ(r.dense_samples[i].t, times[i]);
    EXPECT_EQ(r.dense_samples.back().phi, r.final_state.phi);

    const std::vector<double> bad{2.0, 1.0};
    EXPECT_THROW((void)flow(State{3.0, 0.0, 0.0}, kTwoPi, Field::averaged, Params{1.0, 2.0},
                            Forcing::zero(), IntegratorConfig{}, false, bad),
                 DomainError);
}

TEST(Flow, HonoursToleranceAgainstTightReference) {
    const Params params{0.2, 1.9};
    const Forcing f = Forcing::harmonic(0.3);
    const State s0{2.7, 0.4, 0.0};
    const auto ref = flow(s0, kTwoPi, Field::averaged, params, f,
                          IntegratorConfig::with_tolerance(1e-13));
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        const auto r = flow(s0, kTwoPi, Field::averaged, params, f,
                            IntegratorConfig::with_tolerance(tol));
        const double err = std::hypot(r.final_state.phi - ref.final_state.phi,
                                      r.final_state.p - ref.final_state.p);
        EXPECT_LT(err, 100 * tol) << "tol=" << tol;
    }
}

TEST(Flow, Errors) {
    IntegratorConfig tiny;
    tiny.max_steps = 3;
    EXPECT_THROW((void)flow(State{2.0, 0.0, 0.0}, kTwoPi, Field::averaged, Params{1.0, 2.0},
                            Forcing::zero(), tiny),
                 StepBudgetExceeded);
    EXPECT_THROW((void)flow(State{2.0, 0.0, 0.0}, kTwoPi, Field::original,
                            Params{1.0, 2.0, 1.0 / 50.5}, Forcing::zero(), IntegratorConfig{}),
                 DomainError);
    EXPECT_THROW((void)flow(State{NAN, 0.0, 0.0}, 1.0, Field::averaged, Params{1.0, 2.0},
                            Forcing::zero(), IntegratorConfig{}),
                 NonFiniteState);
    EXPECT_THROW((void)flow(State{2.0, 0.0, 0.0}, -1.0, Field::averaged, Params{1.0, 2.0},
                            Forcing::zero(), IntegratorConfig{}),
                 DomainError);
    // Blow-up in finite time with F growing like a huge constant.
    EXPECT_THROW((void)flow(State{2.0, 1e300, 0.0}, 10.0, Field::averaged, Params{1.0, 2.0},
                            Forcing::fourier({1e300}, {}), IntegratorConfig{}),
                 IntegrationError);
}

TEST(FlowFixed, FourthOrderConvergence) {
    const Params params{0.3, 2.0};
    const Forcing f = Forcing::harmonic(0.4);
    const State s0{2.5, 0.3, 0.0};
    const auto ref = flow(s0, kTwoPi, Field::averaged, params, f,
                          IntegratorConfig::with_tolerance(1e-13));
    auto error = [&](std::size_t n) {
        const auto r = flow_fixed(s0, kTwoPi, n, Field::averaged, params, f);
        return std::hypot(r.final_state.phi - ref.final_state.phi,
                          r.final_state.p - ref.final_state.p);
    };
    const double e1 = error(100), e2 = error(200), e3 = error(400);
    EXPECT_NEAR(e1 / e2, 16.0, 2.0);
    EXPECT_NEAR(e2 / e3, 16.0, 2.0);
}

TEST(FlowFixed, AgreesWithAdaptiveOnRoundTripOrbit) {
    const Params params{1.0, 2.0};
    const auto traj = ReferenceTrajectory::cosine_family(0.5);
    const auto f = inverse_force(traj, params);
    const State s0{kPi - 0.5, 0.0, 0.0};
    const auto fixed = flow_fixed(s0, kTwoPi, 4000, Field::averaged, params, f);
    const auto adaptive = flow(s0, kTwoPi, Field::averaged, params, f,
                               IntegratorConfig::with_tolerance(1e-12));
    EXPECT_NEAR(fixed.final_state.phi, adaptive.final_state.phi, 1e-8);
    EXPECT_NEAR(fixed.final_state.p, adaptive.final_state.p, 1e-8);
}

TEST(FlowFixed, DeterministicAndRecordsSamples) {
    const Params params{0.5, 2.0, 0.02};
    const auto run = [&] {
        return flow_fixed(State{3.0, 0.1, 0.0}, kTwoPi, 10000, Field::original, params,
                          Forcing::harmonic(0.1), true, 100);
    };
    const auto a = run(), b = run();
    EXPECT_EQ(a.final_state.phi, b.final_state.phi);
    EXPECT_EQ(a.final_state.p, b.final_state.p);
    EXPECT_EQ(*a.variational, *b.variational);
    ASSERT_EQ(a.dense_samples.size(), 101u);
    EXPECT_EQ(a.dense_samples.front().t, 0.0);
    EXPECT_THROW((void)flow_fixed(State{3.0, 0.1, 0.0}, kTwoPi, 100, Field::original, params,
                                  Forcing::zero()),
                 DomainError);
}
