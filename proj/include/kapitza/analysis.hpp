// Parameter-space studies over the forcing amplitude A and the vibration
// amplitude a: stability rasters for prescribed orbits, critical-amplitude
// bisection and continuation, bifurcation scans, and the averaged/original
// consistency check.
#pragma once

#include "kapitza/orbits.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kapitza {

enum class Verdict { stable, unstable, no_orbit, failed };
enum class ChartMode { region_grid, critical_curve, bifurcation_scan };

[[nodiscard]] const char* to_string(Verdict v) noexcept;
[[nodiscard]] const char* to_string(ChartMode m) noexcept;

struct ChartCell {
    double A = 0.0;
    double a = 0.0;
    Verdict verdict = Verdict::failed;
    double max_multiplier_abs = 0.0;
    double phi0 = 0.0;
    double p0 = 0.0;
    double residual = 0.0;
    std::string note;
};

struct StabilityChart {
    ChartMode mode = ChartMode::region_grid;
    std::vector<double> A_axis;
    std::vector<double> a_axis;
    /// RegionGrid: row-major over (A index, a index). CriticalCurve: one cell
    /// per A with a = a_star.
    std::vector<ChartCell> cells;
    double mu = 0.0;
    std::string family_id;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    std::string created; // ISO-8601 UTC
    bool complete = true;
    std::string diagnostic;

    [[nodiscard]] const ChartCell& at(std::size_t i_A, std::size_t j_a) const;
};

/// For each (A, a) the prescribed orbit phi(t) = pi - A cos t is
/// made exact by the inverse force and classified by its monodromy.
[[nodiscard]] StabilityChart stability_region(std::span<const double> A_grid,
                                              std::span<const double> a_grid, double mu,
                                              const IntegratorConfig& cfg = {},
                                              unsigned jobs = 0);

struct CriticalPoint {
    double A = 0.0;
    double a_star = 0.0;
    double a_lo = 0.0;
    double a_hi = 0.0;
    PeriodicOrbit orbit_at_a_hi;
};

inline constexpr double kBisectionTol = 1e-4;

/// Bisection on a for the loss of stability of the continued orbit. The orbit
/// must be Stable at a_bracket.second and not Stable at a_bracket.first
/// (InvalidBracket otherwise). Each midpoint is re-converged from the nearest
/// converged orbit, halving the continuation step on failure (LostOrbit when
/// that does not help).
[[nodiscard]] CriticalPoint critical_a_bisect(double A, double mu, const ForcingFamily& family,
                                              std::pair<double, double> a_bracket,
                                              std::pair<double, double> seed,
                                              const IntegratorConfig& cfg = {},
                                              double tol = kBisectionTol);

struct CurveOptions {
    double a_start = 2.0;     // first probe at the A = 0 anchor
    double probe_step = 0.05; // bracket probes in a
    int max_probes = 40;
    double dA = 0.01;         // continuation step in A
    double dA_min = 1e-4;
    double bisect_tol = kBisectionTol;
};

/// Critical curve a*(A): natural-parameter continuation in A from the
/// vertical equilibrium at A = 0, bracket probing and bisection at every grid
/// value. On ContinuationBreakdown the partial curve is returned with
/// complete = false.
[[nodiscard]] StabilityChart critical_a_curve(std::span<const double> A_grid, double mu,
                                              const ForcingFamily& family,
                                              const IntegratorConfig& cfg = {},
                                              const CurveOptions& opts = {});

struct BifurcationEntry {
    double a = 0.0;
    std::vector<PeriodicOrbit> orbits;
    std::size_t dropped = 0;
    std::vector<std::string> diagnostics;
};

/// All distinct orbits in the momentum box for each a (seed_grid).
[[nodiscard]] std::vector<BifurcationEntry>
bifurcation_scan(double A, double mu, std::span<const double> a_list,
                 const ForcingFamily& family, int n_phi, int n_p,
                 const IntegratorConfig& cfg = {}, const SeedOptions& opts = {});

struct AveragingReport {
    int k = 0;
    double seed_distance = 0.0; // |x_original(0) - x_averaged(0)|
    double sup_distance = 0.0;  // max over one period of |x_original(t) - x_averaged(t)|
    bool stability_agrees = false;
    PeriodicOrbit original;
};

/// Refine a 2*pi-periodic orbit of the original system (eps = 1/k) seeded at
/// an averaged orbit and compare the two. Throws NoConvergence when no
/// original orbit exists within 0.5 of the seed.
[[nodiscard]] AveragingReport averaged_vs_original_check(const PeriodicOrbit& averaged, int k,
                                                         const IntegratorConfig& cfg = {});

/// n points from lo to hi inclusive.
[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace kapitza
