#include "kapitza/trajectory.hpp"

#include "kapitza/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kapitza {

double reduce_period(double t) noexcept {
    double r = t - kTwoPi * std::floor(t / kTwoPi);
    // floor can leave r == 2*pi after rounding for t just below a multiple.
    if (r >= kTwoPi)
        r -= kTwoPi;
    return r < 0.0 ? 0.0 : r;
}

ReferenceTrajectory ReferenceTrajectory::cosine_family(double amplitude) {
    return from_fourier(kPi, {-amplitude}, {0.0});
}

ReferenceTrajectory ReferenceTrajectory::from_fourier(double mean, std::vector<double> cos_coeffs,
                                                      std::vector<double> sin_coeffs) {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::isfinite(mean) || !std::all_of(cos_coeffs.begin(), cos_coeffs.end(), finite) ||
        !std::all_of(sin_coeffs.begin(), sin_coeffs.end(), finite))
        throw DomainError("reference trajectory coefficients must be finite");
    const auto n = std::max(cos_coeffs.size(), sin_coeffs.size());
    cos_coeffs.resize(n, 0.0);
    sin_coeffs.resize(n, 0.0);
    ReferenceTrajectory traj;
    traj.mean_ = mean;
    traj.cos_ = std::move(cos_coeffs);
    traj.sin_ = std::move(sin_coeffs);
    return traj;
}

ReferenceTrajectory ReferenceTrajectory::from_samples(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 8)
        throw DomainError("sampled reference trajectory needs at least 8 samples");
    const std::size_t harmonics = n / 2;
    std::vector<double> c(harmonics, 0.0);
    std::vector<double> s(harmonics, 0.0);
    double mean = 0.0;
    for (double v : samples)
        mean += v;
    mean /= static_cast<double>(n);
    for (std::size_t k = 1; k <= harmonics; ++k) {
        double ck = 0.0;
        double sk = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // Reduce the phase index exactly before converting to an angle.
            const double angle = kTwoPi * static_cast<double>((k * j) % n) / static_cast<double>(n);
            ck += samples[j] * std::cos(angle);
            sk += samples[j] * std::sin(angle);
        }
        double scale = 2.0 / static_cast<double>(n);
        // Nyquist term is shared by +k and -k.
        if (n % 2 == 0 && k == harmonics)
            scale = 1.0 / static_cast<double>(n);
        c[k - 1] = ck * scale;
        s[k - 1] = (n % 2 == 0 && k == harmonics) ? 0.0 : sk * scale;
    }
    return from_fourier(mean, std::move(c), std::move(s));
}

double ReferenceTrajectory::phi(double t) const noexcept {
    const double r = reduce_period(t);
    double v = mean_;
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        v += cos_[i] * std::cos(n * r) + sin_[i] * std::sin(n * r);
    }
    return v;
}

double ReferenceTrajectory::dphi(double t) const noexcept {
    const double r = reduce_period(t);
    double v = 0.0;
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        v += n * (-cos_[i] * std::sin(n * r) + sin_[i] * std::cos(n * r));
    }
    return v;
}

double ReferenceTrajectory::ddphi(double t) const noexcept {
    const double r = reduce_period(t);
    double v = 0.0;
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        v -= n * n * (cos_[i] * std::cos(n * r) + sin_[i] * std::sin(n * r));
    }
    return v;
}

ReferenceTrajectory ReferenceTrajectory::reflected() const {
    ReferenceTrajectory r = *this;
    r.mean_ = kTwoPi - mean_;
    for (auto& c : r.cos_)
        c = -c;
    for (auto& s : r.sin_)
        s = -s;
    return r;
}

void ReferenceTrajectory::require_non_falling(int n_grid) const {
    n_grid = std::max(n_grid, 1024);
    for (int j = 0; j < n_grid; ++j) {
        const double t = kTwoPi * j / n_grid;
        const double v = phi(t);
        if (!(v > kPi / 2 && v < 3 * kPi / 2)) {
            std::ostringstream msg;
            msg << "reference trajectory leaves (pi/2, 3pi/2): phi(" << t << ") = " << v;
            throw DomainError(msg.str());
        }
    }
}

double ReferenceTrajectory::min_abs_cos(int n_grid) const {
    double m = 1.0;
    for (int j = 0; j < n_grid; ++j)
        m = std::min(m, std::abs(std::cos(phi(kTwoPi * j / n_grid))));
    return m;
}

} // namespace kapitza
