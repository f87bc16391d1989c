#include "kapitza/conditions.hpp"

#include "kapitza/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kapitza {

double k_constant(double q) {
    if (std::isnan(q) || q < 1.0)
        throw DomainError("K(q) is defined for q >= 1");
    if (std::isinf(q))
        return 2.0 / kPi;
    const double ratio = std::tgamma(1.0 / q) / std::tgamma(0.5 + 1.0 / q);
    return 1.0 / (q * std::pow(kTwoPi, 2.0 / q)) * std::pow(2.0 / (2.0 + q), 1.0 - 2.0 / q) *
           ratio * ratio;
}

double restoring_torque(double phi, double a) noexcept {
    return -std::sin(phi) - 0.25 * a * a * std::sin(2.0 * phi);
}

CriticalAngles critical_angles(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("critical_angles requires a > 0");
    const double a2 = a * a;
    const double root = std::sqrt(1.0 + 2.0 * a2 * a2);
    CriticalAngles c;
    // (-1 + root) / (2 a^2) without the cancellation for small a.
    c.lambda1 = a2 / (root + 1.0);
    c.lambda2 = (-1.0 - root) / (2.0 * a2);
    c.phi_min1 = std::acos(c.lambda1);
    c.phi_max1 = kTwoPi - c.phi_min1;
    if (c.lambda2 >= -1.0 - 1e-12) {
        const double angle = std::acos(std::max(c.lambda2, -1.0));
        c.phi_max2 = angle;
        c.phi_min2 = kTwoPi - angle;
    }
    return c;
}

TorresVerdict torres_check(const Params& params, const Forcing& f, double k) {
    params.validate();
    if (std::isnan(k) || k < 1.0)
        throw DomainError("norm index k must be >= 1");

    TorresVerdict v;
    v.k_used = k;
    v.f_bound = 2.0 / kPi;
    const double a2 = params.a * params.a;

    v.details.push_back({"vibration", a2 > 2.0, a2 - 2.0});
    const CriticalAngles angles = params.a > 0.0 ? critical_angles(params.a) : CriticalAngles{};
    if (!(a2 > 2.0) || !angles.phi_max2) {
        v.reason = "requires a^2 > 2";
        return v;
    }
    v.beta = *angles.phi_max2;
    v.alpha = *angles.phi_min2;

    constexpr int n_t = 4096;
    constexpr int n_phi = 513;
    std::vector<double> force(n_t);
    for (int j = 0; j < n_t; ++j)
        force[j] = f(kTwoPi * j / n_t);

    // (i) sup |F| <= 2/pi
    const double sup_f = f.max_abs();
    v.details.push_back({"force_bound", sup_f <= v.f_bound, v.f_bound - sup_f});

    // (ii) -F cos(beta) < Phi(beta) and Phi(alpha) < -F cos(alpha) for all t
    const double phi_beta = restoring_torque(v.beta, params.a);
    const double phi_alpha = restoring_torque(v.alpha, params.a);
    double sign_margin = kInfinity;
    for (double F : force) {
        sign_margin = std::min(sign_margin, phi_beta + F * std::cos(v.beta));
        sign_margin = std::min(sign_margin, -F * std::cos(v.alpha) - phi_alpha);
    }
    v.details.push_back({"sign_conditions", sign_margin > 0.0, sign_margin});

    // (iii) f = 2/pi in Omega_{k,mu}: ||f||_k < (1 + mu^2/4) K(2k/(k-1)), L^k over [0, 2pi].
    const double q = std::isinf(k) ? 2.0 : (k == 1.0 ? kInfinity : 2.0 * k / (k - 1.0));
    const double norm = std::isinf(k) ? v.f_bound : v.f_bound * std::pow(kTwoPi, 1.0 / k);
    const double omega_bound = (1.0 + 0.25 * params.mu * params.mu) * k_constant(q);
    const double omega_margin = omega_bound - norm;
    v.details.push_back({"omega_membership", params.mu > 0.0 && omega_margin > 0.0,
                         params.mu > 0.0 ? omega_margin : -kInfinity});

    // (iv) dg/dphi = cos phi + (a^2/2) cos 2phi + F sin phi <= f on [beta, alpha]
    std::vector<double> base(n_phi);
    std::vector<double> sines(n_phi);
    for (int i = 0; i < n_phi; ++i) {
        const double phi = v.beta + (v.alpha - v.beta) * i / (n_phi - 1);
        base[i] = std::cos(phi) + 0.5 * a2 * std::cos(2.0 * phi);
        sines[i] = std::sin(phi);
    }
    double sup_dg = -kInfinity;
    for (double F : force)
        for (int i = 0; i < n_phi; ++i)
            sup_dg = std::max(sup_dg, base[i] + F * sines[i]);
    v.details.push_back({"domination", sup_dg <= v.f_bound, v.f_bound - sup_dg});

    v.applies = std::all_of(v.details.begin(), v.details.end(),
                            [](const Hypothesis& h) { return h.passed; });
    if (!v.applies) {
        std::ostringstream msg;
        msg << "failed:";
        for (const auto& h : v.details)
            if (!h.passed)
                msg << ' ' << h.name;
        v.reason = msg.str();
    }
    return v;
}

ResonanceResult resonance_check(double a) {
    if (!(a >= 0.0) || !std::isfinite(a))
        throw DomainError("resonance_check requires a >= 0");
    ResonanceResult r;
    r.value = std::sqrt(1.0 + 0.5 * a * a);
    r.distance = std::abs(r.value - std::round(r.value));
    r.resonant = r.distance < kResonanceTol;
    return r;
}

double momentum_bound(const Params& params, const Forcing& f) {
    params.validate();
    if (params.mu == 0.0)
        throw DomainError("momentum bound is infinite for mu = 0");
    return (1.0 + 0.25 * params.a * params.a + f.max_abs()) / params.mu;
}

bool prop1_condition(const Params& params) noexcept {
    return params.mu > 0.0 && params.a * params.a > 2.0;
}

} // namespace kapitza
