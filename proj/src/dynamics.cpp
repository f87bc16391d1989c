#include "kapitza/dynamics.hpp"

#include "kapitza/errors.hpp"

#include <cmath>
#include <sstream>

namespace kapitza {

Params Params::with_k(double mu, double a, int k) {
    if (k < 1)
        throw DomainError("k must be a positive integer");
    return Params{mu, a, 1.0 / static_cast<double>(k)};
}

void Params::validate() const {
    std::ostringstream msg;
    if (!std::isfinite(mu) || mu < 0.0)
        msg << "mu must be finite and >= 0 (got " << mu << ")";
    else if (!std::isfinite(a) || a < 0.0)
        msg << "a must be finite and >= 0 (got " << a << ")";
    else if (!std::isfinite(epsilon) || epsilon <= 0.0)
        msg << "epsilon must be finite and > 0 (got " << epsilon << ")";
    else
        return;
    throw DomainError(msg.str());
}

bool Params::commensurable() const noexcept {
    if (!(epsilon > 0.0))
        return false;
    const double k = 1.0 / epsilon;
    const double r = std::round(k);
    return r >= 1.0 && std::abs(k - r) <= 1e-9 * r;
}

bool State::finite() const noexcept {
    return std::isfinite(phi) && std::isfinite(p) && std::isfinite(t);
}

bool State::non_falling() const noexcept {
    return phi > kPi / 2 && phi < 3 * kPi / 2;
}

const char* to_string(Field f) noexcept {
    return f == Field::averaged ? "averaged" : "original";
}

Rates rhs_averaged(const State& s, const Params& params, const Forcing& f) {
    f.require_compatible(params);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);
    const double dp = -sin_phi - params.mu * s.p -
                      0.25 * params.a * params.a * std::sin(2.0 * s.phi) + f(s.t) * cos_phi;
    return {s.p, dp};
}

Rates rhs_original(const State& s, const Params& params, const Forcing& f) {
    f.require_compatible(params);
    const double hdot = params.a * std::cos(s.t / params.epsilon);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);
    const double dphi = s.p - hdot * sin_phi;
    const double dp = -sin_phi - params.mu * s.p + params.mu * hdot * sin_phi +
                      hdot * s.p * cos_phi - hdot * hdot * sin_phi * cos_phi + f(s.t) * cos_phi;
    return {dphi, dp};
}

Rates rhs(Field field, const State& s, const Params& params, const Forcing& f) {
    return field == Field::averaged ? rhs_averaged(s, params, f) : rhs_original(s, params, f);
}

Mat2 jacobian_averaged(const State& s, const Params& params, const Forcing& f) {
    f.require_compatible(params);
    Mat2 j;
    j(0, 0) = 0.0;
    j(0, 1) = 1.0;
    j(1, 0) = -std::cos(s.phi) - 0.5 * params.a * params.a * std::cos(2.0 * s.phi) -
              f(s.t) * std::sin(s.phi);
    j(1, 1) = -params.mu;
    return j;
}

Mat2 jacobian_original(const State& s, const Params& params, const Forcing& f) {
    constexpr double h = 1e-7;
    const Rates fp = rhs_original({s.phi + h, s.p, s.t}, params, f);
    const Rates fm = rhs_original({s.phi - h, s.p, s.t}, params, f);
    const Rates gp = rhs_original({s.phi, s.p + h, s.t}, params, f);
    const Rates gm = rhs_original({s.phi, s.p - h, s.t}, params, f);
    Mat2 j;
    j(0, 0) = (fp.dphi - fm.dphi) / (2 * h);
    j(1, 0) = (fp.dp - fm.dp) / (2 * h);
    j(0, 1) = (gp.dphi - gm.dphi) / (2 * h);
    j(1, 1) = (gp.dp - gm.dp) / (2 * h);
    return j;
}

Forcing inverse_force(const ReferenceTrajectory& traj, const Params& params) {
    params.validate();
    traj.require_non_falling();
    const double guard = traj.min_abs_cos(8192);
    if (guard <= kInverseForceCosGuard) {
        std::ostringstream msg;
        msg << "reference trajectory approaches phi = pi/2 or 3pi/2 (min |cos phi| = " << guard
            << ")";
        throw DomainError(msg.str());
    }
    return Forcing{forcing::InverseDerived{traj, params.mu, params.a}};
}

State symmetry_reflect(const State& s) noexcept {
    return {kTwoPi - s.phi, -s.p, s.t};
}

Forcing symmetry_reflect_forcing(const Forcing& f) {
    return f.reflected();
}

} // namespace kapitza
