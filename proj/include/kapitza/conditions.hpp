// Closed-form sufficient conditions for stable non-falling periodic solutions
// of the averaged system, plus the momentum bound of the search box.
#pragma once

#include "kapitza/dynamics.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace kapitza {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sobolev-type constant K(q), q in [1, inf]; K(inf) = 2/pi, K(2) = 1/4.
/// Throws DomainError for q < 1.
[[nodiscard]] double k_constant(double q);

/// Critical points of Phi(phi) = -sin phi - (a^2/4) sin 2phi.
struct CriticalAngles {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double phi_min1 = 0.0;
    double phi_max1 = 0.0;
    // Present iff a^2 >= 2.
    std::optional<double> phi_max2;
    std::optional<double> phi_min2;
};

[[nodiscard]] CriticalAngles critical_angles(double a);

/// Phi(phi) = -sin phi - (a^2/4) sin 2phi.
[[nodiscard]] double restoring_torque(double phi, double a) noexcept;

struct Hypothesis {
    std::string name;
    bool passed = false;
    /// Positive when the hypothesis holds strictly; its size is the slack.
    double margin = 0.0;
};

struct TorresVerdict {
    bool applies = false;
    double alpha = 0.0; // phi_min2
    double beta = 0.0;  // phi_max2
    double k_used = kInfinity;
    double f_bound = 0.0; // dominating constant f(t) = 2/pi
    std::vector<Hypothesis> details;
    std::string reason;
};

/// Checks the stability criterion for a Duffing-type reduction of the averaged
/// system on [beta, alpha] = [phi_max2, phi_min2] with dominating constant
/// f = 2/pi and norm index k. See the README for the exact hypothesis list.
[[nodiscard]] TorresVerdict torres_check(const Params& params, const Forcing& f,
                                         double k = kInfinity);

struct ResonanceResult {
    bool resonant = false;
    double value = 0.0;    // sqrt(1 + a^2/2)
    double distance = 0.0; // to the nearest integer
};

inline constexpr double kResonanceTol = 1e-9;

[[nodiscard]] ResonanceResult resonance_check(double a);

/// P = (1 + a^2/4 + max|F|) / mu. Throws DomainError when mu == 0.
[[nodiscard]] double momentum_bound(const Params& params, const Forcing& f);

/// mu > 0 and a^2 > 2.
[[nodiscard]] bool prop1_condition(const Params& params) noexcept;

} // namespace kapitza
