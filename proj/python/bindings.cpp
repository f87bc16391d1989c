#include "kapitza/analysis.hpp"
#include "kapitza/conditions.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/io.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kapitza;

namespace {

// JSON documents cross the boundary as Python objects via the json module.
py::object to_python(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_python(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Periodic non-falling solutions of the vibrated inverted pendulum";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    auto integration = py::register_exception<IntegrationError>(m, "IntegrationError", error.ptr());
    py::register_exception<StepBudgetExceeded>(m, "StepBudgetExceeded", integration.ptr());
    py::register_exception<StepUnderflow>(m, "StepUnderflow", integration.ptr());
    py::register_exception<NonFiniteState>(m, "NonFiniteState", integration.ptr());
    auto orbit_error = py::register_exception<OrbitError>(m, "OrbitError", error.ptr());
    py::register_exception<SingularJacobian>(m, "SingularJacobian", orbit_error.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", orbit_error.ptr());
    py::register_exception<LeftDomain>(m, "LeftDomain", orbit_error.ptr());
    auto analysis = py::register_exception<AnalysisError>(m, "AnalysisError", error.ptr());
    py::register_exception<InvalidBracket>(m, "InvalidBracket", analysis.ptr());
    py::register_exception<LostOrbit>(m, "LostOrbit", analysis.ptr());
    py::register_exception<ContinuationBreakdown>(m, "ContinuationBreakdown", analysis.ptr());

    py::enum_<Field>(m, "Field").value("averaged", Field::averaged).value("original", Field::original);
    py::enum_<Stability>(m, "Stability")
        .value("stable", Stability::stable)
        .value("unstable", Stability::unstable)
        .value("marginal", Stability::marginal);
    py::enum_<Verdict>(m, "Verdict")
        .value("stable", Verdict::stable)
        .value("unstable", Verdict::unstable)
        .value("no_orbit", Verdict::no_orbit)
        .value("failed", Verdict::failed);

    py::class_<Params>(m, "Params")
        .def(py::init([](double mu, double a, double epsilon) {
                 Params p{mu, a, epsilon};
                 p.validate();
                 return p;
             }),
             py::arg("mu"), py::arg("a"), py::arg("epsilon") = 0.02)
        .def_static("with_k", &Params::with_k, py::arg("mu"), py::arg("a"), py::arg("k"))
        .def_readonly("mu", &Params::mu)
        .def_readonly("a", &Params::a)
        .def_readonly("epsilon", &Params::epsilon)
        .def("__repr__", [](const Params& p) {
            return "Params(mu=" + format_double(p.mu) + ", a=" + format_double(p.a) +
                   ", epsilon=" + format_double(p.epsilon) + ")";
        });

    py::class_<Forcing>(m, "Forcing")
        .def_static("zero", &Forcing::zero)
        .def_static("harmonic", &Forcing::harmonic, py::arg("amplitude"), py::arg("phase") = 0.0)
        .def_static("fourier", &Forcing::fourier, py::arg("cos"), py::arg("sin"))
        .def_static("sampled", &Forcing::sampled, py::arg("values"))
        .def_static("from_json", [](const py::object& o) { return forcing_from_json(from_python(o)); })
        .def("to_json", [](const Forcing& f) { return to_python(forcing_to_json(f)); })
        .def("__call__", &Forcing::operator(), py::arg("t"))
        .def("max_abs", &Forcing::max_abs)
        .def("reflected", &Forcing::reflected)
        .def_property_readonly("type", [](const Forcing& f) { return std::string(f.type_name()); });

    py::class_<ReferenceTrajectory>(m, "ReferenceTrajectory")
        .def_static("cosine_family", &ReferenceTrajectory::cosine_family, py::arg("A"))
        .def_static("from_fourier", &ReferenceTrajectory::from_fourier, py::arg("mean"),
                    py::arg("cos"), py::arg("sin"))
        .def_static("from_samples",
                    [](const std::vector<double>& s) { return ReferenceTrajectory::from_samples(s); })
        .def("phi", &ReferenceTrajectory::phi)
        .def("dphi", &ReferenceTrajectory::dphi)
        .def("ddphi", &ReferenceTrajectory::ddphi);

    m.def("inverse_force", &inverse_force, py::arg("trajectory"), py::arg("params"));

    m.def(
        "rhs",
        [](Field field, double phi, double p, double t, const Params& params, const Forcing& f) {
            const Rates r = rhs(field, State{phi, p, t}, params, f);
            return std::make_pair(r.dphi, r.dp);
        },
        py::arg("field"), py::arg("phi"), py::arg("p"), py::arg("t"), py::arg("params"),
        py::arg("forcing"));

    m.def(
        "flow",
        [](double phi, double p, double t0, double T, Field field, const Params& params,
           const Forcing& f, double tol, bool variational) {
            const FlowResult r = flow(State{phi, p, t0}, T, field, params, f,
                                      IntegratorConfig::with_tolerance(tol), variational);
            py::dict out;
            out["phi"] = r.final_state.phi;
            out["p"] = r.final_state.p;
            out["t"] = r.final_state.t;
            out["steps"] = r.steps_taken;
            if (r.variational)
                out["monodromy"] = *r.variational;
            return out;
        },
        py::arg("phi"), py::arg("p"), py::arg("t0"), py::arg("T"), py::arg("field"),
        py::arg("params"), py::arg("forcing"), py::arg("tol") = 1e-10,
        py::arg("variational") = false);

    py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
        .def_readonly("phi0", &PeriodicOrbit::phi0)
        .def_readonly("p0", &PeriodicOrbit::p0)
        .def_readonly("residual", &PeriodicOrbit::residual)
        .def_readonly("monodromy", &PeriodicOrbit::monodromy)
        .def_property_readonly("multipliers",
                               [](const PeriodicOrbit& o) {
                                   return std::vector<std::complex<double>>(o.multipliers.begin(),
                                                                            o.multipliers.end());
                               })
        .def_readonly("stability", &PeriodicOrbit::stability)
        .def_readonly("field", &PeriodicOrbit::field)
        .def_readonly("phi_min", &PeriodicOrbit::phi_min)
        .def_readonly("phi_max", &PeriodicOrbit::phi_max)
        .def_readonly("max_abs_p", &PeriodicOrbit::max_abs_p)
        .def("to_json", [](const PeriodicOrbit& o) { return to_python(orbit_to_json(o)); });

    py::class_<SearchBox>(m, "SearchBox")
        .def(py::init<double, double, double, double>(), py::arg("phi_lo"), py::arg("phi_hi"),
             py::arg("p_lo"), py::arg("p_hi"))
        .def_static("momentum_box", &SearchBox::momentum_box, py::arg("params"), py::arg("forcing"))
        .def_readonly("phi_lo", &SearchBox::phi_lo)
        .def_readonly("phi_hi", &SearchBox::phi_hi)
        .def_readonly("p_lo", &SearchBox::p_lo)
        .def_readonly("p_hi", &SearchBox::p_hi);

    m.def(
        "residual_phi",
        [](double phi0, double p0, Field field, const Params& params, const Forcing& f, double tol) {
            return residual_phi(phi0, p0, field, params, f, IntegratorConfig::with_tolerance(tol));
        },
        py::arg("phi0"), py::arg("p0"), py::arg("field"), py::arg("params"), py::arg("forcing"),
        py::arg("tol") = 1e-10);

    m.def(
        "newton_refine",
        [](double phi0, double p0, Field field, const Params& params, const Forcing& f, double tol) {
            return newton_refine(phi0, p0, field, params, f, IntegratorConfig::with_tolerance(tol));
        },
        py::arg("phi0"), py::arg("p0"), py::arg("field"), py::arg("params"), py::arg("forcing"),
        py::arg("tol") = 1e-10);

    m.def(
        "seed_grid",
        [](const SearchBox& box, int n_phi, int n_p, Field field, const Params& params,
           const Forcing& f, double tol, bool deflation, unsigned jobs) {
            SeedOptions opts;
            opts.deflation = deflation;
            opts.jobs = jobs;
            return seed_grid(box, n_phi, n_p, field, params, f,
                             IntegratorConfig::with_tolerance(tol), opts)
                .orbits;
        },
        py::arg("box"), py::arg("n_phi"), py::arg("n_p"), py::arg("field"), py::arg("params"),
        py::arg("forcing"), py::arg("tol") = 1e-10, py::arg("deflation") = true,
        py::arg("jobs") = 0);

    m.def("multipliers", [](const Mat2& mat) {
        const Multipliers rho = multipliers(mat);
        return std::vector<std::complex<double>>(rho.begin(), rho.end());
    });

    m.def("k_constant", &k_constant, py::arg("q"));
    m.def("critical_angles",
          [](double a) { return to_python(critical_angles_to_json(critical_angles(a))); },
          py::arg("a"));
    m.def(
        "torres_check",
        [](const Params& params, const Forcing& f, double k) {
            return to_python(torres_to_json(torres_check(params, f, k)));
        },
        py::arg("params"), py::arg("forcing"), py::arg("k") = kInfinity);
    m.def(
        "resonance_check",
        [](double a) {
            const ResonanceResult r = resonance_check(a);
            py::dict out;
            out["resonant"] = r.resonant;
            out["value"] = r.value;
            out["distance"] = r.distance;
            return out;
        },
        py::arg("a"));
    m.def("momentum_bound", &momentum_bound, py::arg("params"), py::arg("forcing"));
    m.def("prop1_condition", &prop1_condition, py::arg("params"));

    py::class_<ChartCell>(m, "ChartCell")
        .def_readonly("A", &ChartCell::A)
        .def_readonly("a", &ChartCell::a)
        .def_readonly("verdict", &ChartCell::verdict)
        .def_readonly("max_multiplier_abs", &ChartCell::max_multiplier_abs)
        .def_readonly("phi0", &ChartCell::phi0)
        .def_readonly("p0", &ChartCell::p0)
        .def_readonly("residual", &ChartCell::residual)
        .def_readonly("note", &ChartCell::note);

    py::class_<StabilityChart>(m, "StabilityChart")
        .def_readonly("A_axis", &StabilityChart::A_axis)
        .def_readonly("a_axis", &StabilityChart::a_axis)
        .def_readonly("cells", &StabilityChart::cells)
        .def_readonly("mu", &StabilityChart::mu)
        .def_readonly("complete", &StabilityChart::complete)
        .def_readonly("diagnostic", &StabilityChart::diagnostic);

    m.def(
        "stability_region",
        [](const std::vector<double>& A_grid, const std::vector<double>& a_grid, double mu,
           double tol, unsigned jobs) {
            return stability_region(A_grid, a_grid, mu, IntegratorConfig::with_tolerance(tol), jobs);
        },
        py::arg("A_grid"), py::arg("a_grid"), py::arg("mu"), py::arg("tol") = 1e-10,
        py::arg("jobs") = 0);

    py::class_<CriticalPoint>(m, "CriticalPoint")
        .def_readonly("A", &CriticalPoint::A)
        .def_readonly("a_star", &CriticalPoint::a_star)
        .def_readonly("a_lo", &CriticalPoint::a_lo)
        .def_readonly("a_hi", &CriticalPoint::a_hi)
        .def_readonly("orbit_at_a_hi", &CriticalPoint::orbit_at_a_hi);

    m.def(
        "critical_a_bisect",
        [](double A, double mu, std::pair<double, double> bracket, std::pair<double, double> seed,
           double phase, double tol) {
            return critical_a_bisect(A, mu, ForcingFamily::harmonic(phase), bracket, seed,
                                     IntegratorConfig::with_tolerance(tol));
        },
        py::arg("A"), py::arg("mu"), py::arg("a_bracket"), py::arg("seed"),
        py::arg("phase") = 0.0, py::arg("tol") = 1e-10);

    m.def(
        "critical_a_curve",
        [](const std::vector<double>& A_grid, double mu, double phase, double tol) {
            return critical_a_curve(A_grid, mu, ForcingFamily::harmonic(phase),
                                    IntegratorConfig::with_tolerance(tol));
        },
        py::arg("A_grid"), py::arg("mu"), py::arg("phase") = 0.0, py::arg("tol") = 1e-10);

    py::class_<AveragingReport>(m, "AveragingReport")
        .def_readonly("k", &AveragingReport::k)
        .def_readonly("seed_distance", &AveragingReport::seed_distance)
        .def_readonly("sup_distance", &AveragingReport::sup_distance)
        .def_readonly("stability_agrees", &AveragingReport::stability_agrees)
        .def_readonly("original", &AveragingReport::original);

    m.def(
        "averaged_vs_original_check",
        [](const PeriodicOrbit& orbit, int k, double tol) {
            return averaged_vs_original_check(orbit, k, IntegratorConfig::with_tolerance(tol));
        },
        py::arg("orbit"), py::arg("k"), py::arg("tol") = 1e-10);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
