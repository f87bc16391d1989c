// Pendulum with a vertically vibrating pivot h(t) = a*eps*sin(t/eps) and a
// 2*pi-periodic horizontal force F(t): the original (fast) vector field, the
// averaged one, their Jacobians, and the inverse-force construction.
#pragma once

#include "kapitza/forcing.hpp"
#include "kapitza/trajectory.hpp"

#include <Eigen/Core>

namespace kapitza {

using Mat2 = Eigen::Matrix2d;

struct Params {
    double mu = 0.0;       // viscous friction
    double a = 0.0;        // vibration amplitude
    double epsilon = 0.02; // fast time scale, original system only

    /// Params with epsilon = 1/k.
    static Params with_k(double mu, double a, int k);

    /// Throws DomainError unless mu >= 0, a >= 0, epsilon > 0 (all finite).
    void validate() const;

    /// True when 1/epsilon is a positive integer (to 1e-9 relative).
    [[nodiscard]] bool commensurable() const noexcept;

    friend bool operator==(const Params&, const Params&) = default;
};

struct State {
    double phi = kPi;
    double p = 0.0;
    double t = 0.0;

    [[nodiscard]] bool finite() const noexcept;
    /// phi in (pi/2, 3*pi/2).
    [[nodiscard]] bool non_falling() const noexcept;
};

struct Rates {
    double dphi = 0.0;
    double dp = 0.0;
};

enum class Field { averaged, original };

[[nodiscard]] const char* to_string(Field f) noexcept;

/// dphi = p, dp = -sin phi - mu p - (a^2/4) sin 2phi + F(t) cos phi
[[nodiscard]] Rates rhs_averaged(const State& s, const Params& params, const Forcing& f);

/// The full system with hdot = a cos(t/eps).
[[nodiscard]] Rates rhs_original(const State& s, const Params& params, const Forcing& f);

[[nodiscard]] Rates rhs(Field field, const State& s, const Params& params, const Forcing& f);

/// Analytic Jacobian of rhs_averaged with respect to (phi, p).
[[nodiscard]] Mat2 jacobian_averaged(const State& s, const Params& params, const Forcing& f);

/// Central-difference Jacobian of rhs_original, step 1e-7.
[[nodiscard]] Mat2 jacobian_original(const State& s, const Params& params, const Forcing& f);

/// Force for which `traj` solves the averaged system exactly:
///
///     F = (phi'' + sin phi + mu phi' + (a^2/4) sin 2phi) / cos phi
///
/// Throws DomainError if traj is not non-falling or min |cos phi| <= 1e-6.
[[nodiscard]] Forcing inverse_force(const ReferenceTrajectory& traj, const Params& params);

inline constexpr double kInverseForceCosGuard = 1e-6;

/// (phi, p) -> (2*pi - phi, -p). Paired with F -> -F this is a symmetry of
/// the averaged flow.
[[nodiscard]] State symmetry_reflect(const State& s) noexcept;
[[nodiscard]] Forcing symmetry_reflect_forcing(const Forcing& f);

} // namespace kapitza
