#include "kapitza/orbits.hpp"

#include "kapitza/conditions.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace kapitza {

const char* to_string(Stability s) noexcept {
    switch (s) {
    case Stability::stable:
        return "stable";
    case Stability::unstable:
        return "unstable";
    default:
        return "marginal";
    }
}

Multipliers multipliers(const Mat2& m) {
    const double tr = m.trace();
    const double det = m.determinant();
    const double half = 0.5 * tr;
    const double disc = half * half - det;
    Multipliers rho;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double big = half + std::copysign(s, half);
        const double small = big != 0.0 ? det / big : half - s;
        rho = {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
    } else {
        const double im = std::sqrt(-disc);
        rho = {std::complex<double>(half, im), std::complex<double>(half, -im)};
    }
    std::sort(rho.begin(), rho.end(), [](const auto& l, const auto& r) {
        const double al = std::abs(l);
        const double ar = std::abs(r);
        if (al != ar)
            return al > ar;
        if (l.real() != r.real())
            return l.real() > r.real();
        return l.imag() > r.imag();
    });
    return rho;
}

Stability classify(const Multipliers& rho) noexcept {
    const double largest = std::max(std::abs(rho[0]), std::abs(rho[1]));
    if (largest < 1.0 - kStabilityMargin)
        return Stability::stable;
    if (largest > 1.0 + kStabilityMargin)
        return Stability::unstable;
    return Stability::marginal;
}

double PeriodicOrbit::max_multiplier_abs() const noexcept {
    return std::max(std::abs(multipliers[0]), std::abs(multipliers[1]));
}

SearchBox SearchBox::momentum_box(const Params& params, const Forcing& f) {
    const double P = momentum_bound(params, f);
    return SearchBox{kPi / 2, 3 * kPi / 2, -P, P};
}

SearchBox SearchBox::enlarged(double fraction) const {
    const double dphi = fraction * (phi_hi - phi_lo);
    const double dp = fraction * (p_hi - p_lo);
    return SearchBox{phi_lo - dphi, phi_hi + dphi, p_lo - dp, p_hi + dp};
}

bool SearchBox::contains(double phi, double p) const noexcept {
    return phi >= phi_lo && phi <= phi_hi && p >= p_lo && p <= p_hi;
}

void SearchBox::validate() const {
    if (!(phi_hi > phi_lo) || !(p_hi > p_lo) || !std::isfinite(phi_lo) || !std::isfinite(phi_hi) ||
        !std::isfinite(p_lo) || !std::isfinite(p_hi))
        throw DomainError("search box must be finite and non-degenerate");
}

double residual_phi(double phi0, double p0, Field field, const Params& params, const Forcing& f,
                    const IntegratorConfig& cfg) {
    const FlowResult r = flow(State{phi0, p0, 0.0}, kTwoPi, field, params, f, cfg);
    return std::hypot(r.final_state.phi - phi0, r.final_state.p - p0);
}

Mat2 monodromy(double phi0, double p0, Field field, const Params& params, const Forcing& f,
               const IntegratorConfig& cfg) {
    const FlowResult r = flow(State{phi0, p0, 0.0}, kTwoPi, field, params, f, cfg, true);
    const double res = std::hypot(r.final_state.phi - phi0, r.final_state.p - p0);
    if (!(res < 1e-6)) {
        std::ostringstream msg;
        msg << "monodromy requested at a non-periodic point (residual " << res << ")";
        throw DomainError(msg.str());
    }
    return *r.variational;
}

std::vector<Sample> sample_orbit(const PeriodicOrbit& orbit, std::size_t n,
                                 const IntegratorConfig& cfg) {
    std::vector<double> times(n);
    for (std::size_t j = 0; j < n; ++j)
        times[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    return flow(State{orbit.phi0, orbit.p0, 0.0}, kTwoPi, orbit.field, orbit.params,
                orbit.forcing, cfg, false, times)
        .dense_samples;
}

namespace {

SearchBox newton_box(const Params& params, const Forcing& f, double margin) {
    SearchBox box{kPi / 2, 3 * kPi / 2, -kInfinity, kInfinity};
    if (params.mu > 0.0) {
        const double P = momentum_bound(params, f);
        box.p_lo = -P;
        box.p_hi = P;
    }
    const double dphi = margin * (box.phi_hi - box.phi_lo);
    box.phi_lo -= dphi;
    box.phi_hi += dphi;
    if (params.mu > 0.0) {
        const double dp = margin * (box.p_hi - box.p_lo);
        box.p_lo -= dp;
        box.p_hi += dp;
    }
    return box;
}

PeriodicOrbit build_orbit(double phi0, double p0, double residual, const Mat2& m, Field field,
                          const Params& params, const Forcing& f, const IntegratorConfig& cfg) {
    PeriodicOrbit orbit;
    orbit.phi0 = phi0;
    orbit.p0 = p0;
    orbit.residual = residual;
    orbit.monodromy = m;
    orbit.multipliers = multipliers(m);
    orbit.stability = classify(orbit.multipliers);
    orbit.field = field;
    orbit.params = params;
    orbit.forcing = f;

    const auto samples = sample_orbit(orbit, 256, cfg);
    orbit.phi_min = kInfinity;
    orbit.phi_max = -kInfinity;
    orbit.max_abs_p = 0.0;
    for (const auto& s : samples) {
        orbit.phi_min = std::min(orbit.phi_min, s.phi);
        orbit.phi_max = std::max(orbit.phi_max, s.phi);
        orbit.max_abs_p = std::max(orbit.max_abs_p, std::abs(s.p));
    }
    return orbit;
}

struct Iterate {
    Eigen::Vector2d x;
    Eigen::Vector2d g; // flow_2pi(x) - x
    Mat2 m;
};

Iterate evaluate(const Eigen::Vector2d& x, Field field, const Params& params, const Forcing& f,
                 const IntegratorConfig& cfg) {
    const FlowResult r = flow(State{x[0], x[1], 0.0}, kTwoPi, field, params, f, cfg, true);
    return {x, Eigen::Vector2d(r.final_state.phi - x[0], r.final_state.p - x[1]), *r.variational};
}

} // namespace

PeriodicOrbit newton_refine(double phi0, double p0, Field field, const Params& params,
                            const Forcing& f, const IntegratorConfig& cfg,
                            const NewtonOptions& opts) {
    params.validate();
    const SearchBox box = newton_box(params, f, opts.box_margin);
    if (!box.contains(phi0, p0)) {
        std::ostringstream msg;
        msg << "Newton guess (" << phi0 << ", " << p0 << ") outside the enlarged search box";
        throw LeftDomain(msg.str());
    }

    Eigen::Vector2d x(phi0, p0);
    double prev = kInfinity;
    int growth = 0;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        const Iterate it = evaluate(x, field, params, f, cfg);
        const double res = it.g.norm();
        if (res < kOrbitResidualTol) {
            PeriodicOrbit orbit = build_orbit(x[0], x[1], res, it.m, field, params, f, cfg);
            if (!(orbit.phi_min > kPi / 2 && orbit.phi_max < 3 * kPi / 2)) {
                std::ostringstream msg;
                msg << "converged orbit leaves the non-falling range (phi in [" << orbit.phi_min
                    << ", " << orbit.phi_max << "])";
                throw LeftDomain(msg.str());
            }
            return orbit;
        }
        growth = res > prev ? growth + 1 : 0;
        if (growth >= opts.max_growth_streak)
            throw NoConvergence("Newton residual grew in 5 consecutive iterations");
        prev = res;

        const Mat2 jac = it.m - Mat2::Identity();
        const double det = jac.determinant();
        if (!(std::abs(det) >= opts.singular_tol)) {
            std::ostringstream msg;
            msg << "det(M - I) = " << det << " at (" << x[0] << ", " << x[1] << ")";
            throw SingularJacobian(msg.str());
        }
        x -= jac.inverse() * it.g;
        if (!box.contains(x[0], x[1])) {
            std::ostringstream msg;
            msg << "Newton iterate (" << x[0] << ", " << x[1] << ") left the search box";
            throw LeftDomain(msg.str());
        }
    }
    std::ostringstream msg;
    msg << "Newton did not converge in " << opts.max_iterations << " iterations";
    throw NoConvergence(msg.str());
}

namespace {

std::string error_kind(const Error& e) {
    if (dynamic_cast<const SingularJacobian*>(&e))
        return "SingularJacobian";
    if (dynamic_cast<const NoConvergence*>(&e))
        return "NoConvergence";
    if (dynamic_cast<const LeftDomain*>(&e))
        return "LeftDomain";
    if (dynamic_cast<const StepBudgetExceeded*>(&e))
        return "StepBudgetExceeded";
    if (dynamic_cast<const StepUnderflow*>(&e))
        return "StepUnderflow";
    if (dynamic_cast<const NonFiniteState*>(&e))
        return "NonFiniteState";
    return "Error";
}

bool same_orbit(const PeriodicOrbit& l, double phi, double p, double tol) {
    return std::abs(l.phi0 - phi) < tol && std::abs(l.p0 - p) < tol;
}

// Newton on m(x) * (flow_2pi(x) - x) with m(x) = prod_i (1/|x - r_i|^2 + 1), which
// removes the known roots r_i from the basin structure.
std::optional<Eigen::Vector2d> deflated_newton(Eigen::Vector2d x,
                                               const std::vector<Eigen::Vector2d>& known,
                                               const SearchBox& box, Field field,
                                               const Params& params, const Forcing& f,
                                               const IntegratorConfig& cfg, double dedup_tol) {
    constexpr int max_iter = 40;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (!box.contains(x[0], x[1]))
            return std::nullopt;
        Eigen::Vector2d w = Eigen::Vector2d::Zero();
        for (const auto& r : known) {
            const Eigen::Vector2d d = x - r;
            const double d2 = d.squaredNorm();
            if (d2 < dedup_tol * dedup_tol)
                return std::nullopt;
            const double m_i = 1.0 / d2 + 1.0;
            w += (-2.0 * d / (d2 * d2)) / m_i;
        }
        Iterate it;
        try {
            it = evaluate(x, field, params, f, cfg);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (it.g.norm() < kOrbitResidualTol)
            return x;
        const Mat2 jac = it.m - Mat2::Identity() + it.g * w.transpose();
        if (!(std::abs(jac.determinant()) > 1e-14))
            return std::nullopt;
        x -= jac.inverse() * it.g;
    }
    return std::nullopt;
}

} // namespace

OrbitScan seed_grid(const SearchBox& box, int n_phi, int n_p, Field field, const Params& params,
                    const Forcing& f, const IntegratorConfig& cfg, const SeedOptions& opts) {
    box.validate();
    if (n_phi < 8 || n_p < 8)
        throw DomainError("seed grid needs at least 8 points per axis");
    params.validate();

    IntegratorConfig scan_cfg = cfg;
    scan_cfg.rel_tol = std::max(cfg.rel_tol, 1e-8);
    scan_cfg.abs_tol = std::max(cfg.abs_tol, 1e-8);

    const double dphi = (box.phi_hi - box.phi_lo) / n_phi;
    const double dp = (box.p_hi - box.p_lo) / n_p;
    auto phi_at = [&](int i) { return box.phi_lo + (i + 0.5) * dphi; };
    auto p_at = [&](int j) { return box.p_lo + (j + 0.5) * dp; };

    const std::size_t n_cells = static_cast<std::size_t>(n_phi) * static_cast<std::size_t>(n_p);
    std::vector<double> res(n_cells, kInfinity);
    parallel_for(n_cells, opts.jobs, [&](std::size_t c) {
        const int i = static_cast<int>(c / static_cast<std::size_t>(n_p));
        const int j = static_cast<int>(c % static_cast<std::size_t>(n_p));
        try {
            res[c] = residual_phi(phi_at(i), p_at(j), field, params, f, scan_cfg);
        } catch (const IntegrationError&) {
            res[c] = kInfinity;
        }
    });

    std::vector<std::pair<int, int>> seeds;
    for (int i = 0; i < n_phi; ++i) {
        for (int j = 0; j < n_p; ++j) {
            const double v = res[static_cast<std::size_t>(i) * n_p + j];
            if (!(v < opts.seed_threshold))
                continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const int ii = i + di;
                    const int jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= n_phi || jj >= n_p)
                        continue;
                    if (!(v < res[static_cast<std::size_t>(ii) * n_p + jj])) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min)
                seeds.emplace_back(i, j);
        }
    }

    struct Outcome {
        std::optional<PeriodicOrbit> orbit;
        std::string error;
    };
    std::vector<Outcome> outcomes(seeds.size());
    parallel_for(seeds.size(), opts.jobs, [&](std::size_t s) {
        try {
            outcomes[s].orbit = newton_refine(phi_at(seeds[s].first), p_at(seeds[s].second), field,
                                              params, f, cfg);
        } catch (const OrbitError& e) {
            outcomes[s].error = error_kind(e);
        } catch (const IntegrationError& e) {
            outcomes[s].error = error_kind(e);
        }
    });

    OrbitScan scan;
    scan.seeds = seeds.size();
    std::map<std::string, std::size_t> failures;
    auto add_unique = [&](PeriodicOrbit orbit) {
        for (const auto& o : scan.orbits)
            if (same_orbit(o, orbit.phi0, orbit.p0, opts.dedup_tol))
                return false;
        scan.orbits.push_back(std::move(orbit));
        return true;
    };
    for (auto& out : outcomes) {
        if (out.orbit)
            add_unique(std::move(*out.orbit));
        else {
            ++scan.dropped;
            ++failures[out.error];
        }
    }

    if (opts.deflation) {
        const SearchBox dbox = box.enlarged(0.1);
        const double step_phi = 0.05;
        const double step_p = std::min(0.05, 0.05 * (box.p_hi - box.p_lo));
        constexpr std::size_t max_orbits = 64;
        for (std::size_t w = 0; w < scan.orbits.size() && scan.orbits.size() < max_orbits; ++w) {
            const PeriodicOrbit centre = scan.orbits[w];
            std::vector<Eigen::Vector2d> dirs{{step_phi, 0.0}, {0.0, step_p}};
            Eigen::EigenSolver<Mat2> es(centre.monodromy);
            for (int e = 0; e < 2; ++e) {
                if (std::abs(es.eigenvalues()[e].imag()) > 0.0)
                    continue;
                Eigen::Vector2d v = es.eigenvectors().col(e).real();
                if (v.norm() > 0.0)
                    dirs.push_back(step_phi * v.normalized());
            }
            for (const auto& d : dirs) {
                for (double sign : {1.0, -1.0}) {
                    std::vector<Eigen::Vector2d> known;
                    known.reserve(scan.orbits.size());
                    for (const auto& o : scan.orbits)
                        known.emplace_back(o.phi0, o.p0);
                    const Eigen::Vector2d start = Eigen::Vector2d(centre.phi0, centre.p0) + sign * d;
                    const auto root =
                        deflated_newton(start, known, dbox, field, params, f, cfg, opts.dedup_tol);
                    if (!root)
                        continue;
                    try {
                        add_unique(newton_refine((*root)[0], (*root)[1], field, params, f, cfg));
                    } catch (const Error&) {
                    }
                }
            }
        }
    }

    for (const auto& [name, count] : failures) {
        std::ostringstream msg;
        msg << count << " seed(s) dropped: " << name;
        scan.diagnostics.push_back(msg.str());
    }
    std::sort(scan.orbits.begin(), scan.orbits.end(), [](const auto& l, const auto& r) {
        return l.phi0 != r.phi0 ? l.phi0 < r.phi0 : l.p0 < r.p0;
    });
    return scan;
}

} // namespace kapitza
