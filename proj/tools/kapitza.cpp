// kapitza: command-line front end.
//
// Exit codes: 0 success, 1 numerical failure, 2 invalid configuration,
// 3 partial result.

#include "cli_config.hpp"

#include "kapitza/analysis.hpp"
#include "kapitza/conditions.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace kapitza;
using cli::ConfigError;
using cli::Manifest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Globals {
    std::string out = ".";
    unsigned jobs = 0;
    double tol = 1e-10;

    [[nodiscard]] IntegratorConfig integrator() const { return IntegratorConfig::with_tolerance(tol); }
};

// --forcing zero | harmonic | <json object> | @<path to json>
struct ForcingSpec {
    std::string spec = "zero";
    double A = 0.0;
    double phase = 0.0;
    std::optional<Forcing> resolved;

    void add_to(CLI::App* app, Manifest& m, const char* default_spec) {
        spec = default_spec;
        app->add_option("--forcing", spec,
                        "zero, harmonic (with --A, --phase), a JSON forcing object or @file.json");
        app->add_option("--A", A, "harmonic forcing amplitude");
        app->add_option("--phase", phase, "harmonic forcing phase (rad)");
        m.bind_json("forcing", [this] { return resolved ? forcing_to_json(*resolved) : json(spec); });
    }

    const Forcing& resolve() {
        if (spec == "zero")
            resolved = Forcing::zero();
        else if (spec == "harmonic")
            resolved = Forcing::harmonic(A, phase);
        else {
            json j;
            try {
                if (!spec.empty() && spec.front() == '@') {
                    std::ifstream in(spec.substr(1));
                    if (!in)
                        throw ConfigError("forcing: cannot open " + spec.substr(1));
                    in >> j;
                } else if (!spec.empty() && spec.front() == '{') {
                    j = json::parse(spec);
                } else {
                    throw ConfigError("forcing: unknown forcing '" + spec + "'");
                }
            } catch (const json::exception& e) {
                throw ConfigError(std::string("forcing: invalid JSON (") + e.what() + ")");
            }
            resolved = forcing_from_json(j);
        }
        return *resolved;
    }
};

Field parse_system(const std::string& s) {
    if (s == "averaged")
        return Field::averaged;
    if (s == "original")
        return Field::original;
    throw ConfigError("system: expected 'averaged' or 'original'");
}

Params make_params(double mu, double a, Field field, std::optional<int> k) {
    Params p{mu, a};
    if (field == Field::original) {
        if (!k)
            throw ConfigError("k: required for the original system");
        if (*k < 1)
            throw ConfigError("k: must be a positive integer");
        p = Params::with_k(mu, a, *k);
    }
    p.validate();
    return p;
}

fs::path prepare_out(const Globals& g) {
    const fs::path dir(g.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("out: cannot create " + g.out + " (" + ec.message() + ")");
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

void write_manifest(const fs::path& dir, const json& manifest) {
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void check_range(const char* name, double lo, double hi, int n) {
    if (n < 1)
        throw ConfigError(std::string(name) + ": number of points must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo || (n > 1 && !(hi > lo)))
        throw ConfigError(std::string(name) + ": empty or invalid range");
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string system = "averaged";
    double mu = 0.0;
    double a = 0.0;
    std::optional<int> k;
    ForcingSpec forcing;
    double phi0 = kPi;
    double p0 = 0.0;
    double t0 = 0.0;
    double T = kTwoPi;
    int samples = 257;
    int fixed_steps = 0;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--system", system, "averaged or original")->check(CLI::IsMember({"averaged", "original"}));
        app->add_option("--mu", mu, "friction coefficient")->required();
        app->add_option("--a", a, "vibration amplitude")->required();
        app->add_option("--k", k, "original system: epsilon = 1/k");
        forcing.add_to(app, m, "zero");
        app->add_option("--phi0", phi0, "initial angle (rad)");
        app->add_option("--p0", p0, "initial momentum");
        app->add_option("--t0", t0, "initial time");
        app->add_option("--T", T, "duration");
        app->add_option("--samples", samples, "output rows (>= 2)");
        app->add_option("--fixed-steps", fixed_steps, "RK4 with this many steps (0 = adaptive)");
        m.bind("system", system);
        m.bind("mu", mu);
        m.bind("a", a);
        m.bind_json("k", [this] { return k ? json(*k) : json(nullptr); });
        m.bind("phi0", phi0);
        m.bind("p0", p0);
        m.bind("t0", t0);
        m.bind("T", T);
        m.bind("samples", samples);
        m.bind("fixed-steps", fixed_steps);
    }

    int run(const Globals& g, const Manifest& m) {
        const Field field = parse_system(system);
        const Params params = make_params(mu, a, field, k);
        const Forcing& f = forcing.resolve();
        f.require_compatible(params);
        if (samples < 2)
            throw ConfigError("samples: must be >= 2");
        if (!(T > 0.0) || !std::isfinite(T))
            throw ConfigError("T: must be > 0");
        if (fixed_steps < 0)
            throw ConfigError("fixed-steps: must be >= 0");
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("simulate"));

        std::vector<Sample> rows;
        const State s0{phi0, p0, t0};
        if (fixed_steps > 0) {
            const auto every = static_cast<std::size_t>(
                std::max(1, fixed_steps / (samples - 1)));
            rows = flow_fixed(s0, T, static_cast<std::size_t>(fixed_steps), field, params, f, false,
                              every)
                       .dense_samples;
        } else {
            std::vector<double> times(static_cast<std::size_t>(samples));
            for (int j = 0; j < samples; ++j)
                times[j] = t0 + T * j / (samples - 1);
            times.back() = t0 + T;
            rows = flow(s0, T, field, params, f, cfg, false, times).dense_samples;
        }
        std::ofstream out(dir / "trajectory.csv", std::ios::binary);
        write_trajectory_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << (dir / "trajectory.csv").string()
                  << '\n';
        return kExitOk;
    }
};

// ----------------------------------------------------------- inverse-force

struct InverseForceCmd {
    double mu = 0.0;
    double a = 0.0;
    double A = 0.0;
    std::string trajectory;
    int samples = 256;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--mu", mu, "friction coefficient")->required();
        app->add_option("--a", a, "vibration amplitude")->required();
        app->add_option("--A", A, "amplitude of the reference phi(t) = pi - A cos t");
        app->add_option("--trajectory", trajectory,
                        "reference trajectory as JSON ({mean,cos,sin} or {samples}) or @file.json");
        app->add_option("--samples", samples, "rows in forcing.csv");
        m.bind("mu", mu);
        m.bind("a", a);
        m.bind("A", A);
        m.bind("trajectory", trajectory);
        m.bind("samples", samples);
    }

    int run(const Globals& g, const Manifest& m) {
        const Params params{mu, a};
        params.validate();
        if (samples < 2)
            throw ConfigError("samples: must be >= 2");
        ReferenceTrajectory traj = ReferenceTrajectory::cosine_family(A);
        if (!trajectory.empty()) {
            try {
                json j = trajectory.front() == '@'
                             ? json::parse(std::ifstream(trajectory.substr(1)))
                             : json::parse(trajectory);
                traj = trajectory_from_json(j);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("trajectory: invalid JSON (") + e.what() + ")");
            }
        }
        const Forcing f = inverse_force(traj, params);
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("inverse-force"));

        const double phi0 = traj.phi(0.0);
        const double p0 = traj.dphi(0.0);
        const double res = residual_phi(phi0, p0, Field::averaged, params, f, cfg);
        json report{{"forcing", forcing_to_json(f)},
                    {"max_abs", f.max_abs()},
                    {"orbit", {{"phi0", phi0}, {"p0", p0}, {"residual", res}}}};
        write_file(dir / "forcing.json", report.dump(2) + "\n");
        std::ofstream out(dir / "forcing.csv", std::ios::binary);
        out << "t,F\n";
        for (int j = 0; j < samples; ++j) {
            const double t = kTwoPi * j / samples;
            out << format_double(t) << ',' << format_double(f(t)) << '\n';
        }
        std::cout << "max|F| = " << format_double(f.max_abs()) << ", residual = "
                  << format_double(res) << '\n';
        return kExitOk;
    }
};

// ------------------------------------------------------------------ orbits

struct OrbitsCmd {
    std::string system = "averaged";
    double mu = 0.0;
    double a = 0.0;
    std::optional<int> k;
    ForcingSpec forcing;
    int n_phi = 64;
    int n_p = 64;
    std::optional<double> phi0;
    std::optional<double> p0;
    bool deflation = true;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--system", system, "averaged or original")->check(CLI::IsMember({"averaged", "original"}));
        app->add_option("--mu", mu, "friction coefficient")->required();
        app->add_option("--a", a, "vibration amplitude")->required();
        app->add_option("--k", k, "original system: epsilon = 1/k");
        forcing.add_to(app, m, "zero");
        app->add_option("--n-phi", n_phi, "seed grid size in phi");
        app->add_option("--n-p", n_p, "seed grid size in p");
        app->add_option("--phi0", phi0, "refine a single guess instead of scanning");
        app->add_option("--p0", p0, "momentum of the single guess");
        app->add_flag("--deflation,!--no-deflation", deflation, "deflated restarts around found orbits");
        m.bind("system", system);
        m.bind("mu", mu);
        m.bind("a", a);
        m.bind_json("k", [this] { return k ? json(*k) : json(nullptr); });
        m.bind("n-phi", n_phi);
        m.bind("n-p", n_p);
        m.bind_json("phi0", [this] { return phi0 ? json(*phi0) : json(nullptr); });
        m.bind_json("p0", [this] { return p0 ? json(*p0) : json(nullptr); });
        m.bind("deflation", deflation);
    }

    int run(const Globals& g, const Manifest& m) {
        const Field field = parse_system(system);
        const Params params = make_params(mu, a, field, k);
        const Forcing& f = forcing.resolve();
        f.require_compatible(params);
        const bool single = phi0.has_value() || p0.has_value();
        if (!single && !(mu > 0.0))
            throw ConfigError("mu: a grid search needs mu > 0 (the momentum bound is infinite)");
        if (!single && (n_phi < 8 || n_p < 8))
            throw ConfigError("n-phi/n-p: must be >= 8");
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("orbits"));

        json doc{{"params", params_to_json(params)}, {"forcing", forcing_to_json(f)}};
        json orbits = json::array();
        if (single) {
            const PeriodicOrbit o =
                newton_refine(phi0.value_or(kPi), p0.value_or(0.0), field, params, f, cfg);
            orbits.push_back(orbit_to_json(o));
        } else {
            SeedOptions opts;
            opts.deflation = deflation;
            opts.jobs = g.jobs;
            const OrbitScan scan = seed_grid(SearchBox::momentum_box(params, f), n_phi, n_p, field,
                                             params, f, cfg, opts);
            for (const auto& o : scan.orbits)
                orbits.push_back(orbit_to_json(o));
            doc["seeds"] = scan.seeds;
            doc["dropped"] = scan.dropped;
            doc["diagnostics"] = scan.diagnostics;
            for (const auto& d : scan.diagnostics)
                std::cerr << "warning: " << d << '\n';
        }
        doc["orbits"] = orbits;
        write_file(dir / "orbits.json", doc.dump(2) + "\n");
        std::cout << orbits.size() << " orbit(s)\n";
        for (const auto& o : orbits)
            std::cout << "  phi0 = " << format_double(o["phi0"]) << ", p0 = "
                      << format_double(o["p0"]) << ", " << o["stability"].get<std::string>()
                      << '\n';
        return kExitOk;
    }
};

// ------------------------------------------------------------------ region

struct RegionCmd {
    double mu = 0.1;
    double A_min = 0.0;
    double A_max = 1.5;
    int n_A = 60;
    double a_min = 0.0;
    double a_max = 8.0;
    int n_a = 80;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--mu", mu, "friction coefficient");
        app->add_option("--A-min", A_min, "smallest reference amplitude A");
        app->add_option("--A-max", A_max, "largest reference amplitude A (< pi/2)");
        app->add_option("--n-A", n_A, "points in A");
        app->add_option("--a-min", a_min, "smallest vibration amplitude");
        app->add_option("--a-max", a_max, "largest vibration amplitude");
        app->add_option("--n-a", n_a, "points in a");
        m.bind("mu", mu);
        m.bind("A-min", A_min);
        m.bind("A-max", A_max);
        m.bind("n-A", n_A);
        m.bind("a-min", a_min);
        m.bind("a-max", a_max);
        m.bind("n-a", n_a);
    }

    int run(const Globals& g, const Manifest& m) {
        check_range("A", A_min, A_max, n_A);
        check_range("a", a_min, a_max, n_a);
        if (A_min < 0.0 || !(A_max < kPi / 2))
            throw ConfigError("A: range must lie in [0, pi/2)");
        if (a_min < 0.0)
            throw ConfigError("a-min: must be >= 0");
        Params{mu, 0.0}.validate();
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("region"));

        const auto A_grid = linspace(A_min, A_max, static_cast<std::size_t>(n_A));
        const auto a_grid = linspace(a_min, a_max, static_cast<std::size_t>(n_a));
        const StabilityChart chart = stability_region(A_grid, a_grid, mu, cfg, g.jobs);
        std::ofstream csv(dir / "region.csv", std::ios::binary);
        write_chart_csv(csv, chart);
        write_file(dir / "region.svg", region_svg(chart));

        const auto failed = std::count_if(chart.cells.begin(), chart.cells.end(), [](const auto& c) {
            return c.verdict == Verdict::failed;
        });
        const auto stable = std::count_if(chart.cells.begin(), chart.cells.end(), [](const auto& c) {
            return c.verdict == Verdict::stable;
        });
        std::cout << chart.cells.size() << " cells, " << stable << " stable, " << failed
                  << " failed\n";
        if (failed * 100 > static_cast<long>(chart.cells.size())) {
            std::cerr << "error: " << chart.diagnostic << '\n';
            return kExitPartial;
        }
        return kExitOk;
    }
};

// ------------------------------------------------------------------- curve

struct CurveCmd {
    std::vector<double> mu{1.0};
    double A_max = 1.5;
    int n_A = 151;
    double phase = 0.0;
    CurveOptions opts;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--mu", mu, "one or more friction coefficients")->expected(1, -1);
        app->add_option("--A-max", A_max, "largest forcing amplitude");
        app->add_option("--n-A", n_A, "points in A, starting at 0");
        app->add_option("--phase", phase, "forcing family A cos(t + phase)");
        app->add_option("--a-start", opts.a_start, "first probe at A = 0");
        app->add_option("--probe-step", opts.probe_step, "bracket probe step in a");
        app->add_option("--dA", opts.dA, "continuation step in A");
        app->add_option("--bisect-tol", opts.bisect_tol, "bisection tolerance in a");
        m.bind("mu", mu);
        m.bind("A-max", A_max);
        m.bind("n-A", n_A);
        m.bind("phase", phase);
        m.bind("a-start", opts.a_start);
        m.bind("probe-step", opts.probe_step);
        m.bind("dA", opts.dA);
        m.bind("bisect-tol", opts.bisect_tol);
    }

    int run(const Globals& g, const Manifest& m) {
        if (mu.empty())
            throw ConfigError("mu: at least one value required");
        for (double v : mu)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("mu: must be > 0");
        check_range("A", 0.0, A_max, n_A);
        if (!(opts.a_start > 0.0) || !(opts.probe_step > 0.0) || !(opts.dA > 0.0) ||
            !(opts.bisect_tol > 0.0))
            throw ConfigError("a-start/probe-step/dA/bisect-tol: must be > 0");
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("curve"));

        const ForcingFamily family = ForcingFamily::harmonic(phase);
        const auto A_grid = linspace(0.0, A_max, static_cast<std::size_t>(n_A));
        std::vector<StabilityChart> curves;
        bool partial = false;
        for (double v : mu) {
            curves.push_back(critical_a_curve(A_grid, v, family, cfg, opts));
            const StabilityChart& c = curves.back();
            std::ofstream csv(dir / ("curve_mu=" + format_double(v) + ".csv"), std::ios::binary);
            write_chart_csv(csv, c);
            std::cout << "mu = " << format_double(v) << ": " << c.cells.size() << " points";
            if (!c.cells.empty())
                std::cout << ", a*(0) = " << format_double(c.cells.front().a);
            std::cout << '\n';
            if (!c.complete) {
                std::cerr << "warning: mu = " << format_double(v) << ": " << c.diagnostic << '\n';
                partial = true;
            }
        }
        write_file(dir / "curves.svg", curves_svg(curves));
        return partial ? kExitPartial : kExitOk;
    }
};

// --------------------------------------------------------------- bifurcate

struct BifurcateCmd {
    double A = 0.1;
    double mu = 0.1;
    std::vector<double> a_list{1.4220, 1.4240};
    double phase = 0.0;
    int n_phi = 64;
    int n_p = 64;
    bool deflation = true;

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--A", A, "forcing amplitude");
        app->add_option("--mu", mu, "friction coefficient");
        app->add_option("--a", a_list, "vibration amplitudes to scan")->expected(1, -1);
        app->add_option("--phase", phase, "forcing family A cos(t + phase)");
        app->add_option("--n-phi", n_phi, "seed grid size in phi");
        app->add_option("--n-p", n_p, "seed grid size in p");
        app->add_flag("--deflation,!--no-deflation", deflation, "deflated restarts around found orbits");
        m.bind("A", A);
        m.bind("mu", mu);
        m.bind("a", a_list);
        m.bind("phase", phase);
        m.bind("n-phi", n_phi);
        m.bind("n-p", n_p);
        m.bind("deflation", deflation);
    }

    int run(const Globals& g, const Manifest& m) {
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw ConfigError("mu: must be > 0 (the search box needs a finite momentum bound)");
        if (n_phi < 32 || n_p < 32)
            throw ConfigError("n-phi/n-p: must be >= 32");
        if (a_list.empty())
            throw ConfigError("a: at least one value required");
        std::vector<double> unique;
        for (double a : a_list) {
            if (!std::isfinite(a) || a < 0.0)
                throw ConfigError("a: values must be finite and >= 0");
            if (std::find(unique.begin(), unique.end(), a) != unique.end()) {
                std::cerr << "warning: duplicate a = " << format_double(a) << " ignored\n";
                continue;
            }
            unique.push_back(a);
        }
        a_list = unique;
        const IntegratorConfig cfg = g.integrator();
        cfg.validate();
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("bifurcate"));

        const ForcingFamily family = ForcingFamily::harmonic(phase);
        SeedOptions opts;
        opts.deflation = deflation;
        opts.jobs = g.jobs;
        const auto scan = bifurcation_scan(A, mu, a_list, family, n_phi, n_p, cfg, opts);
        write_file(dir / "bifurcation.json",
                   bifurcation_to_json(scan, A, mu, family.id).dump(2) + "\n");
        write_file(dir / "bifurcation.svg", bifurcation_svg(scan, A, mu));
        for (const auto& e : scan) {
            std::size_t stable = 0;
            for (const auto& o : e.orbits)
                stable += o.stability == Stability::stable;
            std::cout << "a = " << format_double(e.a) << ": " << e.orbits.size() << " orbit(s), "
                      << stable << " stable\n";
            for (const auto& d : e.diagnostics)
                std::cerr << "warning: a = " << format_double(e.a) << ": " << d << '\n';
        }
        return kExitOk;
    }
};

// ------------------------------------------------------------------- check

struct CheckCmd {
    double mu = 0.0;
    double a = 0.0;
    ForcingSpec forcing;
    std::string k_norm = "inf";

    void add_to(CLI::App* app, Manifest& m) {
        app->add_option("--mu", mu, "friction coefficient")->required();
        app->add_option("--a", a, "vibration amplitude")->required();
        forcing.add_to(app, m, "zero");
        app->add_option("--k-norm", k_norm, "norm index for the stability criterion (>= 1 or inf)");
        m.bind("mu", mu);
        m.bind("a", a);
        m.bind("k-norm", k_norm);
    }

    int run(const Globals& g, const Manifest& m) {
        const Params params{mu, a};
        params.validate();
        const Forcing& f = forcing.resolve();
        f.require_compatible(params);
        double k = kInfinity;
        if (k_norm != "inf") {
            try {
                std::size_t used = 0;
                k = std::stod(k_norm, &used);
                if (used != k_norm.size())
                    throw std::invalid_argument(k_norm);
            } catch (const std::exception&) {
                throw ConfigError("k-norm: expected a number or 'inf'");
            }
            if (!(k >= 1.0))
                throw ConfigError("k-norm: must be >= 1");
        }
        const fs::path dir = prepare_out(g);
        write_manifest(dir, m.resolve("check"));

        json report{{"params", params_to_json(params)}, {"forcing", forcing_to_json(f)}};
        report["prop1_condition"] = prop1_condition(params);
        const ResonanceResult r = resonance_check(a);
        report["resonance"] = {{"resonant", r.resonant}, {"value", r.value}, {"distance", r.distance}};
        report["torres"] = torres_to_json(torres_check(params, f, k));
        try {
            report["momentum_bound"] = momentum_bound(params, f);
        } catch (const DomainError& e) {
            report["momentum_bound"] = {{"error", e.what()}};
        }
        if (a > 0.0)
            report["critical_angles"] = critical_angles_to_json(critical_angles(a));
        else
            report["critical_angles"] = {{"error", "critical angles require a > 0"}};
        const std::string text = report.dump(2) + "\n";
        write_file(dir / "check.json", text);
        std::cout << text;
        return kExitOk;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic non-falling solutions of the vibrated inverted pendulum"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--out", g.out, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads (0 = hardware concurrency)");
    app.add_option("--tol", g.tol, "integrator relative and absolute tolerance");
    // Consumed by expand_config; declared for --help.
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    SimulateCmd simulate;
    InverseForceCmd inverse;
    OrbitsCmd orbits;
    RegionCmd region;
    CurveCmd curve;
    BifurcateCmd bifurcate;
    CheckCmd check;
    std::map<std::string, Manifest> manifests;
    std::map<std::string, std::function<int()>> runners;

    auto add = [&](const char* name, const char* help, auto& cmd) {
        CLI::App* sub = app.add_subcommand(name, help);
        Manifest& m = manifests[name];
        m.bind("out", g.out);
        m.bind("jobs", g.jobs);
        m.bind("tol", g.tol);
        cmd.add_to(sub, m);
        runners[name] = [&cmd, &g, &m] { return cmd.run(g, m); };
    };
    add("simulate", "integrate a trajectory and write t,phi,p rows", simulate);
    add("inverse-force", "force that makes a prescribed trajectory a solution", inverse);
    add("orbits", "find 2*pi-periodic orbits", orbits);
    add("region", "stability raster of the orbits phi = pi - A cos t", region);
    add("curve", "critical vibration amplitude a*(A) for harmonic forcing", curve);
    add("bifurcate", "all periodic orbits for a list of vibration amplitudes", bifurcate);
    add("check", "analytic existence and stability conditions", check);

    std::set<std::string> names;
    for (const auto& [name, r] : runners)
        names.insert(name);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = cli::expand_config(args, names);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return runners.at(command)();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
