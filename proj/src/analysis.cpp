#include "kapitza/analysis.hpp"

#include "kapitza/conditions.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>
#include <stdexcept>

namespace kapitza {

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::stable:
        return "stable";
    case Verdict::unstable:
        return "unstable";
    case Verdict::no_orbit:
        return "no_orbit";
    default:
        return "failed";
    }
}

const char* to_string(ChartMode m) noexcept {
    switch (m) {
    case ChartMode::region_grid:
        return "region_grid";
    case ChartMode::critical_curve:
        return "critical_curve";
    default:
        return "bifurcation_scan";
    }
}

const ChartCell& StabilityChart::at(std::size_t i_A, std::size_t j_a) const {
    if (mode != ChartMode::region_grid || i_A >= A_axis.size() || j_a >= a_axis.size())
        throw std::out_of_range("chart cell index out of range");
    return cells[i_A * a_axis.size() + j_a];
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 1)
        v.back() = hi;
    return v;
}

namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_increasing(std::span<const double> axis, const char* name) {
    if (axis.empty())
        throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i]))
            throw DomainError(std::string(name) + " grid contains a non-finite value");
        if (i > 0 && !(axis[i] > axis[i - 1]))
            throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
}

bool is_stable(const PeriodicOrbit& o) {
    return o.stability == Stability::stable;
}

constexpr double kMaxContinuationStep = 0.01;

// Newton at `a` seeded from an orbit converged at a nearby amplitude; on
// failure the step is halved through intermediate amplitudes.
PeriodicOrbit continue_step(const PeriodicOrbit& from, double a, const IntegratorConfig& cfg,
                            int depth = 0) {
    Params params = from.params;
    params.a = a;
    try {
        return newton_refine(from.phi0, from.p0, from.field, params, from.forcing, cfg);
    } catch (const Error& e) {
        if (dynamic_cast<const DomainError*>(&e) != nullptr)
            throw;
        if (depth >= 8) {
            std::ostringstream msg;
            msg << "orbit lost at a = " << a << ": " << e.what();
            throw LostOrbit(msg.str());
        }
    }
    const PeriodicOrbit mid = continue_step(from, 0.5 * (from.params.a + a), cfg, depth + 1);
    return continue_step(mid, a, cfg, depth + 1);
}

PeriodicOrbit continue_in_a(PeriodicOrbit orbit, double a, const IntegratorConfig& cfg) {
    const double span = a - orbit.params.a;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kMaxContinuationStep)));
    const double a0 = orbit.params.a;
    for (int i = 1; i <= n; ++i)
        orbit = continue_step(orbit, i == n ? a : a0 + span * i / n, cfg);
    return orbit;
}

CriticalPoint bisect_between(double A, PeriodicOrbit orbit_lo, PeriodicOrbit orbit_hi,
                             const IntegratorConfig& cfg, double tol) {
    double lo = orbit_lo.params.a;
    double hi = orbit_hi.params.a;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const PeriodicOrbit& nearest = (mid - lo < hi - mid) ? orbit_lo : orbit_hi;
        PeriodicOrbit orbit_mid = continue_in_a(nearest, mid, cfg);
        if (is_stable(orbit_mid)) {
            hi = mid;
            orbit_hi = std::move(orbit_mid);
        } else {
            lo = mid;
            orbit_lo = std::move(orbit_mid);
        }
    }
    return CriticalPoint{A, 0.5 * (lo + hi), lo, hi, std::move(orbit_hi)};
}

} // namespace

StabilityChart stability_region(std::span<const double> A_grid, std::span<const double> a_grid,
                                double mu, const IntegratorConfig& cfg, unsigned jobs) {
    require_increasing(A_grid, "A");
    require_increasing(a_grid, "a");
    for (double A : A_grid)
        if (!(std::abs(A) < kPi / 2))
            throw DomainError("A values must lie in (-pi/2, pi/2)");
    if (a_grid.front() < 0.0)
        throw DomainError("a values must be >= 0");
    Params{mu, 0.0}.validate();
    cfg.validate();

    StabilityChart chart;
    chart.mode = ChartMode::region_grid;
    chart.A_axis.assign(A_grid.begin(), A_grid.end());
    chart.a_axis.assign(a_grid.begin(), a_grid.end());
    chart.mu = mu;
    chart.family_id = "cosine";
    chart.rel_tol = cfg.rel_tol;
    chart.abs_tol = cfg.abs_tol;
    chart.created = utc_now();
    chart.cells.resize(A_grid.size() * a_grid.size());

    const std::size_t n_a = a_grid.size();
    parallel_for(chart.cells.size(), jobs, [&](std::size_t c) {
        ChartCell& cell = chart.cells[c];
        cell.A = A_grid[c / n_a];
        cell.a = a_grid[c % n_a];
        cell.phi0 = kPi - cell.A;
        cell.p0 = 0.0;
        const Params params{mu, cell.a};
        Forcing f;
        try {
            f = inverse_force(ReferenceTrajectory::cosine_family(cell.A), params);
        } catch (const DomainError& e) {
            cell.verdict = Verdict::no_orbit;
            cell.note = e.what();
            return;
        }
        try {
            const FlowResult r =
                flow(State{cell.phi0, cell.p0, 0.0}, kTwoPi, Field::averaged, params, f, cfg, true);
            cell.residual = std::hypot(r.final_state.phi - cell.phi0, r.final_state.p - cell.p0);
            const Multipliers rho = multipliers(*r.variational);
            cell.max_multiplier_abs = std::max(std::abs(rho[0]), std::abs(rho[1]));
            const Stability s = classify(rho);
            if (!(cell.residual < kOrbitResidualTol)) {
                // The orbit is exact by construction; a strongly unstable
                // period map amplifies the integration error into the
                // residual. Only a Stable verdict needs the residual bound.
                cell.verdict = s == Stability::unstable ? Verdict::unstable : Verdict::failed;
                cell.note = "residual above tolerance";
                return;
            }
            cell.verdict = s == Stability::stable ? Verdict::stable : Verdict::unstable;
            if (s == Stability::marginal)
                cell.note = "marginal";
        } catch (const IntegrationError& e) {
            cell.verdict = Verdict::failed;
            cell.note = e.what();
        }
    });

    const auto failed = std::count_if(chart.cells.begin(), chart.cells.end(),
                                      [](const ChartCell& c) { return c.verdict == Verdict::failed; });
    if (failed > 0) {
        std::ostringstream msg;
        msg << failed << " of " << chart.cells.size() << " cells failed";
        chart.diagnostic = msg.str();
    }
    return chart;
}

CriticalPoint critical_a_bisect(double A, double mu, const ForcingFamily& family,
                                std::pair<double, double> a_bracket,
                                std::pair<double, double> seed, const IntegratorConfig& cfg,
                                double tol) {
    auto [lo, hi] = a_bracket;
    if (!(lo < hi) || !(lo >= 0.0) || !std::isfinite(hi))
        throw InvalidBracket("bracket must satisfy 0 <= a_lo < a_hi");
    if (!(tol > 0.0))
        throw DomainError("bisection tolerance must be > 0");
    const Forcing f = family.at(A);
    const Params params_hi{mu, hi};
    params_hi.validate();

    PeriodicOrbit orbit_hi;
    try {
        orbit_hi = newton_refine(seed.first, seed.second, Field::averaged, params_hi, f, cfg);
    } catch (const Error& e) {
        throw InvalidBracket(std::string("no orbit at a_hi: ") + e.what());
    }
    if (!is_stable(orbit_hi))
        throw InvalidBracket("orbit at a_hi is not stable");
    PeriodicOrbit orbit_lo = continue_in_a(orbit_hi, lo, cfg);
    if (is_stable(orbit_lo))
        throw InvalidBracket("orbit continued to a_lo is stable");
    return bisect_between(A, std::move(orbit_lo), std::move(orbit_hi), cfg, tol);
}

namespace {

struct Bracket {
    PeriodicOrbit lo; // not stable
    PeriodicOrbit hi; // stable
};

// Probe a in fixed steps from the orbit's amplitude until the stability flag
// flips: downwards from a stable orbit, both ways (nearest first) from an
// unstable one.
Bracket find_bracket(const PeriodicOrbit& start, const CurveOptions& opts,
                     const IntegratorConfig& cfg) {
    if (is_stable(start)) {
        PeriodicOrbit orbit = start;
        for (int probe = 0; probe < opts.max_probes; ++probe) {
            const double a_next = orbit.params.a - opts.probe_step;
            if (a_next < 0.0)
                break;
            PeriodicOrbit next = continue_in_a(orbit, a_next, cfg);
            if (!is_stable(next))
                return Bracket{std::move(next), std::move(orbit)};
            orbit = std::move(next);
        }
    } else {
        std::optional<PeriodicOrbit> up = start;
        std::optional<PeriodicOrbit> down = start;
        for (int probe = 0; probe < opts.max_probes && (up || down); ++probe) {
            for (auto* chain : {&up, &down}) {
                if (!*chain)
                    continue;
                const double dir = chain == &up ? 1.0 : -1.0;
                const double a_next = (*chain)->params.a + dir * opts.probe_step;
                if (a_next < 0.0) {
                    chain->reset();
                    continue;
                }
                try {
                    PeriodicOrbit next = continue_in_a(**chain, a_next, cfg);
                    if (is_stable(next)) {
                        if (dir > 0)
                            return Bracket{std::move(**chain), std::move(next)};
                        // Stable below an unstable orbit: the boundary is crossed
                        // downwards, which the curve does not describe.
                        chain->reset();
                        continue;
                    }
                    *chain = std::move(next);
                } catch (const LostOrbit&) {
                    chain->reset();
                }
            }
        }
    }
    std::ostringstream msg;
    msg << "no stability change within " << opts.max_probes << " probes of " << opts.probe_step
        << " from a = " << start.params.a;
    throw ContinuationBreakdown(msg.str());
}

// Natural-parameter continuation in A at fixed a, halving the step on failure.
PeriodicOrbit continue_in_A(PeriodicOrbit orbit, double A_from, double A_to,
                            const ForcingFamily& family, const IntegratorConfig& cfg,
                            const CurveOptions& opts) {
    double A = A_from;
    double dA = opts.dA;
    while (A < A_to) {
        const double A_next = std::min(A + dA, A_to);
        try {
            orbit = newton_refine(orbit.phi0, orbit.p0, Field::averaged, orbit.params,
                                  family.at(A_next), cfg);
            A = A_next;
            dA = opts.dA;
        } catch (const Error& e) {
            dA *= 0.5;
            if (dA < opts.dA_min) {
                std::ostringstream msg;
                msg << "orbit lost continuing from A = " << A << " at a = " << orbit.params.a
                    << ": " << e.what();
                throw ContinuationBreakdown(msg.str());
            }
        }
    }
    return orbit;
}

} // namespace

StabilityChart critical_a_curve(std::span<const double> A_grid, double mu,
                                const ForcingFamily& family, const IntegratorConfig& cfg,
                                const CurveOptions& opts) {
    require_increasing(A_grid, "A");
    if (A_grid.front() != 0.0)
        throw DomainError("critical curve must start at A = 0");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw DomainError("critical curve requires mu > 0");
    cfg.validate();

    StabilityChart chart;
    chart.mode = ChartMode::critical_curve;
    chart.mu = mu;
    chart.family_id = family.id;
    chart.rel_tol = cfg.rel_tol;
    chart.abs_tol = cfg.abs_tol;
    chart.created = utc_now();

    PeriodicOrbit orbit;
    try {
        orbit = newton_refine(kPi, 0.0, Field::averaged, Params{mu, opts.a_start}, family.at(0.0),
                              cfg);
    } catch (const Error& e) {
        chart.complete = false;
        chart.diagnostic = std::string("no anchor orbit at A = 0: ") + e.what();
        return chart;
    }

    double A_prev = 0.0;
    for (double A : A_grid) {
        try {
            if (A > A_prev)
                orbit = continue_in_A(std::move(orbit), A_prev, A, family, cfg, opts);
            A_prev = A;
            Bracket b = find_bracket(orbit, opts, cfg);
            CriticalPoint cp =
                bisect_between(A, std::move(b.lo), std::move(b.hi), cfg, opts.bisect_tol);
            ChartCell cell;
            cell.A = A;
            cell.a = cp.a_star;
            cell.verdict = Verdict::stable;
            cell.max_multiplier_abs = cp.orbit_at_a_hi.max_multiplier_abs();
            cell.phi0 = cp.orbit_at_a_hi.phi0;
            cell.p0 = cp.orbit_at_a_hi.p0;
            cell.residual = cp.orbit_at_a_hi.residual;
            chart.A_axis.push_back(A);
            chart.cells.push_back(std::move(cell));
            orbit = std::move(cp.orbit_at_a_hi);
        } catch (const Error& e) {
            chart.complete = false;
            std::ostringstream msg;
            msg << "continuation breakdown at A = " << A << ": " << e.what();
            chart.diagnostic = msg.str();
            break;
        }
    }
    return chart;
}

std::vector<BifurcationEntry> bifurcation_scan(double A, double mu, std::span<const double> a_list,
                                               const ForcingFamily& family, int n_phi, int n_p,
                                               const IntegratorConfig& cfg,
                                               const SeedOptions& opts) {
    if (n_phi < 32 || n_p < 32)
        throw DomainError("bifurcation scan needs at least 32 grid points per axis");
    for (double a : a_list)
        if (!std::isfinite(a) || a < 0.0)
            throw DomainError("a values must be finite and >= 0");
    const Forcing f = family.at(A);

    std::vector<BifurcationEntry> out;
    out.reserve(a_list.size());
    for (double a : a_list) {
        const Params params{mu, a};
        OrbitScan scan =
            seed_grid(SearchBox::momentum_box(params, f), n_phi, n_p, Field::averaged, params, f, cfg,
                      opts);
        out.push_back({a, std::move(scan.orbits), scan.dropped, std::move(scan.diagnostics)});
    }
    return out;
}

AveragingReport averaged_vs_original_check(const PeriodicOrbit& averaged, int k,
                                           const IntegratorConfig& cfg) {
    if (k < 10)
        throw DomainError("averaging check requires k >= 10");
    if (averaged.field != Field::averaged)
        throw DomainError("averaging check expects an orbit of the averaged system");

    const Params params = Params::with_k(averaged.params.mu, averaged.params.a, k);
    AveragingReport report;
    report.k = k;
    try {
        report.original = newton_refine(averaged.phi0, averaged.p0, Field::original, params,
                                        averaged.forcing, cfg);
    } catch (const Error& e) {
        throw NoConvergence(std::string("no original-system orbit near the averaged seed: ") +
                            e.what());
    }
    report.seed_distance =
        std::hypot(report.original.phi0 - averaged.phi0, report.original.p0 - averaged.p0);
    if (report.seed_distance > 0.5)
        throw NoConvergence("original-system orbit lies farther than 0.5 from the seed");

    // Resolve the fast oscillation: several samples per fast period.
    const std::size_t n = std::max<std::size_t>(256, 16 * static_cast<std::size_t>(k));
    const auto slow = sample_orbit(averaged, n, cfg);
    const auto fast = sample_orbit(report.original, n, cfg);
    for (std::size_t i = 0; i < n; ++i)
        report.sup_distance = std::max(
            report.sup_distance, std::hypot(fast[i].phi - slow[i].phi, fast[i].p - slow[i].p));
    report.stability_agrees = report.original.stability == averaged.stability;
    return report;
}

} // namespace kapitza
