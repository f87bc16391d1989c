#pragma once

#include <span>
#include <vector>

namespace kapitza {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce t into [0, 2*pi). Every periodic evaluation goes through here first.
double reduce_period(double t) noexcept;

/// A 2*pi-periodic reference angle phi(t) stored as a trigonometric
/// polynomial
///
///     phi(t) = mean + sum_{n>=1} cos_n cos(n t) + sin_n sin(n t)
///
/// so that first and second derivatives are exact. Closed-form families are
/// represented exactly; sampled trajectories are converted with a discrete
/// Fourier transform (spectral differentiation).
class ReferenceTrajectory {
public:
    ReferenceTrajectory() = default;

    /// phi(t) = pi - A cos t.
    static ReferenceTrajectory cosine_family(double amplitude);

    /// `cos_coeffs[i]` and `sin_coeffs[i]` multiply harmonic n = i + 1.
    static ReferenceTrajectory from_fourier(double mean, std::vector<double> cos_coeffs,
                                            std::vector<double> sin_coeffs);

    /// Trigonometric interpolant of `samples` taken at t_j = 2*pi*j/N.
    static ReferenceTrajectory from_samples(std::span<const double> samples);

    [[nodiscard]] double phi(double t) const noexcept;
    [[nodiscard]] double dphi(double t) const noexcept;
    [[nodiscard]] double ddphi(double t) const noexcept;

    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
    [[nodiscard]] const std::vector<double>& sin_coeffs() const noexcept { return sin_; }

    /// Mirror image 2*pi - phi(t).
    [[nodiscard]] ReferenceTrajectory reflected() const;

    /// Throws DomainError unless phi(t) lies in (pi/2, 3*pi/2) on a grid of
    /// `n_grid` points (at least 1024).
    void require_non_falling(int n_grid = 4096) const;

    /// min |cos phi(t)| over a uniform grid.
    [[nodiscard]] double min_abs_cos(int n_grid = 4096) const;

    friend bool operator==(const ReferenceTrajectory&, const ReferenceTrajectory&) = default;

private:
    double mean_ = kPi;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

} // namespace kapitza
