#include "kapitza/dynamics.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/integrate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kapitza;

TEST(Params, Validation) {
    EXPECT_NO_THROW((Params{0.0, 0.0, 1.0}.validate()));
    EXPECT_THROW((Params{-0.1, 1.0}.validate()), DomainError);
    EXPECT_THROW((Params{0.1, -1.0}.validate()), DomainError);
    EXPECT_THROW((Params{0.1, 1.0, 0.0}.validate()), DomainError);
    EXPECT_THROW((Params{std::nan(""), 1.0}.validate()), DomainError);
    EXPECT_THROW(Params::with_k(1.0, 2.0, 0), DomainError);
    EXPECT_TRUE(Params::with_k(1.0, 2.0, 50).commensurable());
    EXPECT_FALSE((Params{1.0, 2.0, 1.0 / 50.5}.commensurable()));
}

TEST(State, NonFalling) {
    EXPECT_TRUE((State{kPi, 0.0, 0.0}.non_falling()));
    EXPECT_FALSE((State{kPi / 2, 0.0, 0.0}.non_falling()));
    EXPECT_FALSE((State{3 * kPi / 2, 0.0, 0.0}.non_falling()));
    EXPECT_FALSE((State{kPi, INFINITY, 0.0}.finite()));
}

TEST(RhsAveraged, Examples) {
    const Params p{1.0, 2.0};
    auto r = rhs_averaged(State{kPi, 0.0, 0.7}, p, Forcing::zero());
    EXPECT_NEAR(r.dphi, 0.0, 1e-15);
    EXPECT_NEAR(r.dp, 0.0, 1e-15);

    r = rhs_averaged(State{kPi / 2, 0.0, 0.0}, p, Forcing::zero());
    EXPECT_NEAR(r.dphi, 0.0, 1e-15);
    EXPECT_NEAR(r.dp, -1.0, 1e-15);

    r = rhs_averaged(State{kPi, 0.0, 0.0}, p, Forcing::harmonic(0.5));
    EXPECT_NEAR(r.dphi, 0.0, 1e-15);
    EXPECT_NEAR(r.dp, -0.5, 1e-15);
}

TEST(RhsOriginal, Examples) {
    auto r = rhs_original(State{kPi, 0.0, 0.3}, Params{1.0, 2.0, 0.02}, Forcing::zero());
    EXPECT_NEAR(r.dphi, 0.0, 1e-15);
    EXPECT_NEAR(r.dp, 0.0, 1e-15);

    r = rhs_original(State{kPi / 2, 0.0, 0.0}, Params{0.0, 1.0, 1.0}, Forcing::zero());
    EXPECT_NEAR(r.dphi, -1.0, 1e-15);
    EXPECT_NEAR(r.dp, -1.0, 1e-15);
}

TEST(RhsOriginal, FastAverageMatchesAveragedField) {
    // Midpoint quadrature over one fast period with (phi, p, F) frozen.
    const Params params{0.7, 2.3, 0.01};
    const int n = 4000;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> phi_dist(kPi / 2, 3 * kPi / 2);
    std::uniform_real_distribution<double> p_dist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double phi = phi_dist(rng);
        const double p = p_dist(rng);
        double mean_dp = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = kTwoPi * params.epsilon * (j + 0.5) / n;
            // Freeze the slow forcing time at 0 by evaluating a constant force.
            mean_dp += rhs_original(State{phi, p, t}, params, Forcing::fourier({0.3}, {})).dp;
        }
        mean_dp /= n;
        const double expected =
            rhs_averaged(State{phi, p, 0.0}, params, Forcing::fourier({0.3}, {})).dp;
        EXPECT_NEAR(mean_dp, expected, 1e-10);
    }
}

TEST(JacobianAveraged, Examples) {
    const Mat2 j = jacobian_averaged(State{kPi, 0.0, 0.0}, Params{1.0, 2.0}, Forcing::zero());
    EXPECT_NEAR(j(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(j(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(j(1, 0), -1.0, 1e-15);
    EXPECT_NEAR(j(1, 1), -1.0, 1e-15);

    const Mat2 k = jacobian_averaged(State{kPi / 2, 0.0, 0.0}, Params{0.4, 0.0}, Forcing::zero());
    EXPECT_NEAR(k(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(k(1, 1), -0.4, 1e-15);
}

TEST(JacobianAveraged, MatchesCentralDifferences) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const Params params{2.0 * u(rng), 4.0 * u(rng)};
        const Forcing f = Forcing::fourier({0.2 * u(rng), u(rng)}, {0.0, u(rng)});
        const State s{kPi / 2 + kPi * u(rng), 4.0 * u(rng) - 2.0, kTwoPi * u(rng)};
        const Mat2 j = jacobian_averaged(s, params, f);
        const auto plus_phi = rhs_averaged(State{s.phi + h, s.p, s.t}, params, f);
        const auto minus_phi = rhs_averaged(State{s.phi - h, s.p, s.t}, params, f);
        const auto plus_p = rhs_averaged(State{s.phi, s.p + h, s.t}, params, f);
        const auto minus_p = rhs_averaged(State{s.phi, s.p - h, s.t}, params, f);
        EXPECT_NEAR(j(0, 0), (plus_phi.dphi - minus_phi.dphi) / (2 * h), 1e-6);
        EXPECT_NEAR(j(1, 0), (plus_phi.dp - minus_phi.dp) / (2 * h), 1e-6);
        EXPECT_NEAR(j(0, 1), (plus_p.dphi - minus_p.dphi) / (2 * h), 1e-6);
        EXPECT_NEAR(j(1, 1), (plus_p.dp - minus_p.dp) / (2 * h), 1e-6);
    }
}

TEST(JacobianOriginal, MatchesAnalyticForm) {
    // Hand-derived partials of the original field.
    const Params params{0.3, 1.7, 0.05};
    const Forcing f = Forcing::harmonic(0.4);
    const State s{2.5, 0.3, 0.11};
    const double hd = params.a * std::cos(s.t / params.epsilon);
    const double sn = std::sin(s.phi), cs = std::cos(s.phi);
    const double F = f(s.t);
    const Mat2 j = jacobian_original(s, params, f);
    EXPECT_NEAR(j(0, 0), -hd * cs, 1e-7);
    EXPECT_NEAR(j(0, 1), 1.0, 1e-7);
    EXPECT_NEAR(j(1, 0),
                -cs + params.mu * hd * cs - hd * s.p * sn - hd * hd * (cs * cs - sn * sn) - F * sn,
                1e-7);
    EXPECT_NEAR(j(1, 1), -params.mu + hd * cs, 1e-7);
}

TEST(Symmetry, ReflectionFixesVerticalState) {
    const State r = symmetry_reflect(State{kPi, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(r.phi, kPi);
    EXPECT_DOUBLE_EQ(r.p, 0.0);
    EXPECT_DOUBLE_EQ(r.t, 1.0);
}

TEST(Symmetry, AveragedFieldIsEquivariant) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Params params{u(rng), 3.0 * u(rng)};
        const Forcing f = Forcing::fourier({u(rng) - 0.5, u(rng)}, {0.0, u(rng) - 0.5});
        const State s{kTwoPi * u(rng), 4.0 * u(rng) - 2.0, kTwoPi * u(rng)};
        const auto r = rhs_averaged(s, params, f);
        const auto m = rhs_averaged(symmetry_reflect(s), params, symmetry_reflect_forcing(f));
        EXPECT_NEAR(m.dphi, -r.dphi, 1e-12);
        EXPECT_NEAR(m.dp, -r.dp, 1e-12);
    }
}

TEST(InverseForce, VerticalGivesZero) {
    const auto f = inverse_force(ReferenceTrajectory::cosine_family(0.0), Params{1.0, 2.0});
    for (double t : {0.0, 1.0, 4.0})
        EXPECT_NEAR(f(t), 0.0, 1e-15);
}

TEST(InverseForce, HandValueAtQuarterPeriod) {
    for (double a : {0.0, 1.0, 3.0}) {
        const auto f = inverse_force(ReferenceTrajectory::cosine_family(0.5), Params{1.0, a});
        EXPECT_NEAR(f(kPi / 2), -0.5, 1e-14);
    }
}

TEST(InverseForce, GuardAgainstCosSingularity) {
    EXPECT_THROW(inverse_force(ReferenceTrajectory::cosine_family(kPi / 2), Params{1.0, 2.0}),
                 DomainError);
    EXPECT_THROW(inverse_force(ReferenceTrajectory::cosine_family(1.7), Params{1.0, 2.0}),
                 DomainError);
}

TEST(InverseForce, ReproducesReferenceTrajectory) {
    const Params params{0.5, 2.0};
    const auto traj = ReferenceTrajectory::from_fourier(kPi, {-0.6, 0.1}, {0.2});
    const auto f = inverse_force(traj, params);
    std::vector<double> times;
    for (int j = 1; j <= 64; ++j)
        times.push_back(kTwoPi * j / 64.0);
    const auto r = flow(State{traj.phi(0.0), traj.dphi(0.0), 0.0}, kTwoPi, Field::averaged,
                        params, f, IntegratorConfig{}, false, times);
    ASSERT_EQ(r.dense_samples.size(), times.size());
    double worst = 0.0;
    for (const auto& s : r.dense_samples)
        worst = std::max(worst, std::abs(s.phi - traj.phi(s.t)));
    EXPECT_LT(worst, 1e-7);
}
