#include "kapitza/conditions.hpp"
#include "kapitza/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kapitza;

namespace {

const Hypothesis& find(const TorresVerdict& v, const std::string& name) {
    for (const auto& h : v.details)
        if (h.name == name)
            return h;
    throw std::runtime_error("missing hypothesis " + name);
}

} // namespace

TEST(KConstant, Anchors) {
    EXPECT_NEAR(k_constant(kInfinity), 2.0 / kPi, 1e-15);
    EXPECT_NEAR(k_constant(2.0), 0.25, 1e-14);
    EXPECT_NEAR(k_constant(1e6), 2.0 / kPi, 1e-3);
    EXPECT_GT(k_constant(1.0), 0.0);
    EXPECT_THROW((void)k_constant(0.5), DomainError);
    EXPECT_THROW((void)k_constant(std::nan("")), DomainError);
}

TEST(CriticalAngles, SqrtTwo) {
    const auto c = critical_angles(std::sqrt(2.0));
    EXPECT_NEAR(c.lambda1, 0.5, 1e-15);
    EXPECT_NEAR(c.lambda2, -1.0, 1e-15);
    EXPECT_NEAR(c.phi_min1, kPi / 3, 1e-12);
    ASSERT_TRUE(c.phi_max2 && c.phi_min2);
    EXPECT_NEAR(*c.phi_max2, kPi, 1e-7);
    EXPECT_NEAR(*c.phi_min2, kPi, 1e-7);
}

TEST(CriticalAngles, Limits) {
    const auto large = critical_angles(1e3);
    EXPECT_NEAR(large.phi_min1, kPi / 4, 1e-3);
    ASSERT_TRUE(large.phi_min2);
    EXPECT_NEAR(*large.phi_min2, 5 * kPi / 4, 1e-3);
    EXPECT_NEAR(critical_angles(1e-3).phi_min1, kPi / 2, 1e-3);
    EXPECT_FALSE(critical_angles(1.0).phi_max2.has_value());
    EXPECT_THROW((void)critical_angles(0.0), DomainError);
}

TEST(CriticalAngles, AreCriticalPointsOfTorque) {
    for (double a : {1.5, 2.0, 3.0, 7.0}) {
        const auto c = critical_angles(a);
        auto derivative = [a](double phi) { return -std::cos(phi) - 0.5 * a * a * std::cos(2 * phi); };
        EXPECT_LT(std::abs(derivative(c.phi_min1)), 1e-10);
        EXPECT_LT(std::abs(derivative(c.phi_max1)), 1e-10);
        ASSERT_TRUE(c.phi_max2 && c.phi_min2);
        EXPECT_LT(std::abs(derivative(*c.phi_max2)), 1e-10);
        EXPECT_LT(std::abs(derivative(*c.phi_min2)), 1e-10);
        EXPECT_GT(restoring_torque(*c.phi_max2, a), 0.0);
        EXPECT_LT(restoring_torque(*c.phi_min2, a), 0.0);
        EXPECT_GT(*c.phi_max2, kPi / 2);
        EXPECT_LE(*c.phi_max2, kPi);
        EXPECT_GE(*c.phi_min2, kPi);
        EXPECT_LT(*c.phi_min2, 3 * kPi / 2);
    }
}

TEST(TorresCheck, VerticalCaseNamesFailingHypotheses) {
    const auto v = torres_check(Params{1.0, 2.0}, Forcing::zero());
    EXPECT_FALSE(v.applies);
    EXPECT_TRUE(find(v, "vibration").passed);
    EXPECT_TRUE(find(v, "force_bound").passed);
    EXPECT_TRUE(find(v, "sign_conditions").passed);
    EXPECT_FALSE(find(v, "omega_membership").passed);
    EXPECT_FALSE(find(v, "domination").passed);
    EXPECT_NE(v.reason.find("omega_membership"), std::string::npos);
}

TEST(TorresCheck, StrongForceFailsBound) {
    const auto v = torres_check(Params{3.0, 1.6}, Forcing::harmonic(1.0));
    EXPECT_FALSE(v.applies);
    EXPECT_FALSE(find(v, "force_bound").passed);
    EXPECT_NEAR(find(v, "force_bound").margin, 2.0 / kPi - 1.0, 1e-9);
}

TEST(TorresCheck, AppliesInsideTheWindow) {
    const auto v = torres_check(Params{3.0, 1.6}, Forcing::harmonic(0.05));
    EXPECT_TRUE(v.applies) << v.reason;
    for (const auto& h : v.details)
        EXPECT_GT(h.margin, 0.0) << h.name;
    const auto c = critical_angles(1.6);
    EXPECT_DOUBLE_EQ(v.beta, *c.phi_max2);
    EXPECT_DOUBLE_EQ(v.alpha, *c.phi_min2);
}

TEST(TorresCheck, WeakVibration) {
    const auto v = torres_check(Params{3.0, 1.0}, Forcing::zero());
    EXPECT_FALSE(v.applies);
    EXPECT_FALSE(v.reason.empty());
    ASSERT_EQ(v.details.size(), 1u);
    EXPECT_FALSE(v.details[0].passed);
}

TEST(ResonanceCheck, Examples) {
    EXPECT_TRUE(resonance_check(0.0).resonant);
    EXPECT_DOUBLE_EQ(resonance_check(0.0).value, 1.0);
    const auto r6 = resonance_check(std::sqrt(6.0));
    EXPECT_TRUE(r6.resonant);
    EXPECT_NEAR(r6.value, 2.0, 1e-15);
    const auto r2 = resonance_check(2.0);
    EXPECT_FALSE(r2.resonant);
    EXPECT_NEAR(r2.distance, 2.0 - std::sqrt(3.0), 1e-12);
    EXPECT_THROW((void)resonance_check(-1.0), DomainError);
}

TEST(MomentumBound, Examples) {
    EXPECT_NEAR(momentum_bound(Params{1.0, 2.0}, Forcing::harmonic(1.0)), 3.0, 1e-12);
    EXPECT_NEAR(momentum_bound(Params{0.5, 0.0}, Forcing::zero()), 2.0, 1e-15);
    EXPECT_THROW((void)momentum_bound(Params{0.0, 2.0}, Forcing::zero()), DomainError);
}

TEST(Prop1Condition, Examples) {
    EXPECT_TRUE(prop1_condition(Params{1.0, 2.0}));
    EXPECT_FALSE(prop1_condition(Params{1.0, 1.0}));
    EXPECT_FALSE(prop1_condition(Params{0.0, 2.0}));
}
