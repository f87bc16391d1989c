// 2*pi-periodic orbits as fixed points of the period map: shooting residual,
// Newton refinement with the variational matrix, monodromy and Floquet
// multipliers, and grid-seeded searches over the non-falling box.
#pragma once

#include "kapitza/integrate.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace kapitza {

enum class Stability { stable, unstable, marginal };

[[nodiscard]] const char* to_string(Stability s) noexcept;

using Multipliers = std::array<std::complex<double>, 2>;

/// Margin around |rho| = 1 that separates Stable/Unstable from Marginal.
inline constexpr double kStabilityMargin = 1e-6;
/// Newton convergence threshold on the shooting residual.
inline constexpr double kOrbitResidualTol = 1e-8;

/// Eigenvalues of a 2x2 matrix from its trace and determinant, ordered by
/// descending magnitude, ties by descending real part (then imaginary part).
[[nodiscard]] Multipliers multipliers(const Mat2& m);

[[nodiscard]] Stability classify(const Multipliers& rho) noexcept;

struct PeriodicOrbit {
    double phi0 = kPi;
    double p0 = 0.0;
    double residual = 0.0;
    Mat2 monodromy = Mat2::Identity();
    Multipliers multipliers{};
    Stability stability = Stability::marginal;
    Field field = Field::averaged;
    Params params;
    Forcing forcing;

    // Extent of the orbit over one period (256 samples).
    double phi_min = kPi;
    double phi_max = kPi;
    double max_abs_p = 0.0;

    [[nodiscard]] double max_multiplier_abs() const noexcept;
};

/// Rectangle phi in [phi_lo, phi_hi], p in [p_lo, p_hi].
struct SearchBox {
    double phi_lo = kPi / 2;
    double phi_hi = 3 * kPi / 2;
    double p_lo = -1.0;
    double p_hi = 1.0;

    /// Non-falling range times [-P, P] with P from momentum_bound.
    static SearchBox momentum_box(const Params& params, const Forcing& f);

    /// Widen each side by `fraction` of the corresponding extent.
    [[nodiscard]] SearchBox enlarged(double fraction) const;
    [[nodiscard]] bool contains(double phi, double p) const noexcept;
    void validate() const;
};

/// || flow_2pi(x0) - x0 ||.
[[nodiscard]] double residual_phi(double phi0, double p0, Field field, const Params& params,
                                  const Forcing& f, const IntegratorConfig& cfg);

struct NewtonOptions {
    int max_iterations = 50;
    int max_growth_streak = 5;
    double singular_tol = 1e-12;
    double box_margin = 0.1;
};

/// Newton iteration on flow_2pi(x) - x with Jacobian (M - I).
///
/// Throws SingularJacobian when |det(M - I)| < 1e-12, NoConvergence after 50
/// iterations or 5 consecutive residual increases, LeftDomain when an iterate
/// leaves the enlarged search box or the converged orbit leaves the
/// non-falling range.
[[nodiscard]] PeriodicOrbit newton_refine(double phi0, double p0, Field field,
                                          const Params& params, const Forcing& f,
                                          const IntegratorConfig& cfg,
                                          const NewtonOptions& opts = {});

/// d flow_2pi / d x at (phi0, p0). Requires residual < 1e-6 there.
[[nodiscard]] Mat2 monodromy(double phi0, double p0, Field field, const Params& params,
                             const Forcing& f, const IntegratorConfig& cfg);

/// Orbit sampled at n equally spaced times over [0, 2*pi].
[[nodiscard]] std::vector<Sample> sample_orbit(const PeriodicOrbit& orbit, std::size_t n,
                                               const IntegratorConfig& cfg);

struct SeedOptions {
    double seed_threshold = 0.5;
    double dedup_tol = 1e-6;
    /// Deflated Newton restarts around each distinct orbit, which separates
    /// clustered orbits near a bifurcation that the grid cannot resolve.
    bool deflation = true;
    unsigned jobs = 0; // 0 = hardware concurrency
};

struct OrbitScan {
    std::vector<PeriodicOrbit> orbits; // sorted by (phi0, p0)
    std::size_t seeds = 0;             // local minima launched
    std::size_t dropped = 0;           // failed or falling refinements
    std::vector<std::string> diagnostics;
};

/// Residual on an n_phi x n_p cell-centred grid over `box`, Newton from every
/// strict local minimum below the seeding threshold, deduplicated.
[[nodiscard]] OrbitScan seed_grid(const SearchBox& box, int n_phi, int n_p, Field field,
                                  const Params& params, const Forcing& f,
                                  const IntegratorConfig& cfg, const SeedOptions& opts = {});

} // namespace kapitza
