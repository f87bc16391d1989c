#include "kapitza/io.hpp"

#include "kapitza/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace kapitza {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw DomainError(field + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object())
        bad(where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
            bad(where + "." + k, "unknown key");
    }
}

double number(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key))
        bad(where + "." + key, "missing");
    const json& v = j.at(key);
    if (!v.is_number())
        bad(where + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        bad(where + "." + key, "must be finite");
    return d;
}

std::vector<double> numbers(const json& j, const std::string& where, const char* key,
                            bool required = true) {
    if (!j.contains(key)) {
        if (required)
            bad(where + "." + key, "missing");
        return {};
    }
    const json& v = j.at(key);
    if (!v.is_array())
        bad(where + "." + key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number())
            bad(where + "." + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json complex_pair(std::complex<double> z) {
    return json::array({z.real(), z.imag()});
}

} // namespace

json trajectory_to_json(const ReferenceTrajectory& traj) {
    return json{{"mean", traj.mean()}, {"cos", traj.cos_coeffs()}, {"sin", traj.sin_coeffs()}};
}

ReferenceTrajectory trajectory_from_json(const json& j) {
    const std::string where = "trajectory";
    if (j.is_object() && j.contains("family")) {
        only_keys(j, where, {"family", "A"});
        if (j.at("family") != "cosine")
            bad(where + ".family", "only \"cosine\" is known");
        return ReferenceTrajectory::cosine_family(number(j, where, "A"));
    }
    if (j.is_object() && j.contains("samples")) {
        only_keys(j, where, {"samples"});
        const auto s = numbers(j, where, "samples");
        try {
            return ReferenceTrajectory::from_samples(s);
        } catch (const DomainError& e) {
            bad(where + ".samples", e.what());
        }
    }
    only_keys(j, where, {"mean", "cos", "sin"});
    return ReferenceTrajectory::from_fourier(number(j, where, "mean"),
                                             numbers(j, where, "cos", false),
                                             numbers(j, where, "sin", false));
}

json forcing_to_json(const Forcing& f) {
    const auto& v = f.variant();
    json j{{"type", std::string(f.type_name())}};
    if (const auto* h = std::get_if<forcing::Harmonic>(&v)) {
        j["amplitude"] = h->amplitude;
        j["phase"] = h->phase;
    } else if (const auto* fo = std::get_if<forcing::Fourier>(&v)) {
        j["cos"] = fo->cos;
        j["sin"] = fo->sin;
    } else if (const auto* s = std::get_if<forcing::Sampled>(&v)) {
        j["values"] = s->values();
        j["order"] = "cubic";
    } else if (const auto* inv = std::get_if<forcing::InverseDerived>(&v)) {
        j["trajectory"] = trajectory_to_json(inv->trajectory);
        j["mu"] = inv->mu;
        j["a"] = inv->a;
    }
    return j;
}

Forcing forcing_from_json(const json& j) {
    const std::string where = "forcing";
    if (j.is_string()) {
        if (j == "zero")
            return Forcing::zero();
        bad(where, "string form only accepts \"zero\"");
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        bad(where + ".type", "missing or not a string");
    const std::string type = j.at("type");
    try {
        if (type == "zero") {
            only_keys(j, where, {"type"});
            return Forcing::zero();
        }
        if (type == "harmonic") {
            only_keys(j, where, {"type", "amplitude", "phase"});
            const double phase = j.contains("phase") ? number(j, where, "phase") : 0.0;
            return Forcing::harmonic(number(j, where, "amplitude"), phase);
        }
        if (type == "fourier") {
            only_keys(j, where, {"type", "cos", "sin"});
            return Forcing::fourier(numbers(j, where, "cos", false),
                                    numbers(j, where, "sin", false));
        }
        if (type == "sampled") {
            only_keys(j, where, {"type", "values", "order"});
            if (j.contains("order") && j.at("order") != "cubic")
                bad(where + ".order", "only \"cubic\" interpolation is supported");
            return Forcing::sampled(numbers(j, where, "values"));
        }
        if (type == "inverse") {
            only_keys(j, where, {"type", "trajectory", "mu", "a"});
            if (!j.contains("trajectory"))
                bad(where + ".trajectory", "missing");
            const Params params{number(j, where, "mu"), number(j, where, "a")};
            return inverse_force(trajectory_from_json(j.at("trajectory")), params);
        }
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0 || msg.rfind("trajectory", 0) == 0)
            throw;
        bad(where, msg);
    }
    bad(where + ".type", "unknown forcing type \"" + type + "\"");
}

json params_to_json(const Params& p) {
    return json{{"mu", p.mu}, {"a", p.a}, {"epsilon", p.epsilon}};
}

json orbit_to_json(const PeriodicOrbit& o) {
    const Mat2& m = o.monodromy;
    return json{
        {"phi0", o.phi0},
        {"p0", o.p0},
        {"residual", o.residual},
        {"monodromy", json::array({m(0, 0), m(0, 1), m(1, 0), m(1, 1)})},
        {"multipliers", json::array({complex_pair(o.multipliers[0]), complex_pair(o.multipliers[1])})},
        {"max_multiplier_abs", o.max_multiplier_abs()},
        {"stability", to_string(o.stability)},
        {"field", to_string(o.field)},
        {"params", params_to_json(o.params)},
        {"forcing", forcing_to_json(o.forcing)},
        {"phi_min", o.phi_min},
        {"phi_max", o.phi_max},
        {"max_abs_p", o.max_abs_p},
    };
}

json torres_to_json(const TorresVerdict& v) {
    json hyps = json::object();
    for (const auto& h : v.details) {
        json margin = std::isfinite(h.margin) ? json(h.margin) : json(nullptr);
        hyps[h.name] = json{{"passed", h.passed}, {"margin", margin}};
    }
    json j{{"applies", v.applies},
           {"k_used", std::isinf(v.k_used) ? json("inf") : json(v.k_used)},
           {"f_bound", v.f_bound},
           {"hypotheses", hyps}};
    const bool has_interval = !v.details.empty() && v.details.front().passed;
    j["alpha"] = has_interval ? json(v.alpha) : json(nullptr);
    j["beta"] = has_interval ? json(v.beta) : json(nullptr);
    if (!v.reason.empty())
        j["reason"] = v.reason;
    return j;
}

json critical_angles_to_json(const CriticalAngles& c) {
    json j{{"lambda1", c.lambda1},   {"lambda2", c.lambda2},   {"phi_min1", c.phi_min1},
           {"phi_max1", c.phi_max1}, {"phi_max2", nullptr}, {"phi_min2", nullptr}};
    if (c.phi_max2)
        j["phi_max2"] = *c.phi_max2;
    if (c.phi_min2)
        j["phi_min2"] = *c.phi_min2;
    return j;
}

json bifurcation_to_json(const std::vector<BifurcationEntry>& scan, double A, double mu,
                         const std::string& family_id) {
    json entries = json::array();
    for (const auto& e : scan) {
        json orbits = json::array();
        std::size_t stable = 0;
        for (const auto& o : e.orbits) {
            orbits.push_back(orbit_to_json(o));
            stable += o.stability == Stability::stable;
        }
        entries.push_back(json{{"a", e.a},
                               {"count", e.orbits.size()},
                               {"stable", stable},
                               {"orbits", orbits},
                               {"dropped", e.dropped},
                               {"diagnostics", e.diagnostics}});
    }
    return json{{"A", A}, {"mu", mu}, {"family", family_id}, {"scan", entries}};
}

void write_chart_csv(std::ostream& out, const StabilityChart& chart) {
    out << "A,a,verdict,max_multiplier_abs,phi0,p0\n";
    for (const auto& c : chart.cells)
        out << format_double(c.A) << ',' << format_double(c.a) << ',' << to_string(c.verdict) << ','
            << format_double(c.max_multiplier_abs) << ',' << format_double(c.phi0) << ','
            << format_double(c.p0) << '\n';
}

void write_trajectory_csv(std::ostream& out, const std::vector<Sample>& samples) {
    out << "t,phi,p\n";
    for (const auto& s : samples)
        out << format_double(s.t) << ',' << format_double(s.phi) << ',' << format_double(s.p)
            << '\n';
}

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 540;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 30;
constexpr double kBottom = 60;

struct Frame {
    double x0, x1, y0, y1;

    [[nodiscard]] double px(double x) const {
        return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
    }
    [[nodiscard]] double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

Frame make_frame(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0)) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    return Frame{x0, x1, y0, y1};
}

void svg_open(std::ostringstream& s, const std::string& title) {
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title
      << "</text>\n";
}

void svg_axes(std::ostringstream& s, const Frame& f, const std::string& xlabel,
              const std::string& ylabel) {
    const double xl = f.px(f.x0), xr = f.px(f.x1), yb = f.py(f.y0), yt = f.py(f.y1);
    s << "<rect x=\"" << xl << "\" y=\"" << yt << "\" width=\"" << xr - xl << "\" height=\""
      << yb - yt << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 5;
        const double y = f.y0 + (f.y1 - f.y0) * i / 5;
        s << "<text x=\"" << f.px(x) << "\" y=\"" << yb + 16 << "\" text-anchor=\"middle\">"
          << format_double(std::round(x * 1000) / 1000) << "</text>\n";
        s << "<text x=\"" << xl - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">"
          << format_double(std::round(y * 1000) / 1000) << "</text>\n";
    }
    s << "<text x=\"" << (xl + xr) / 2 << "\" y=\"" << kHeight - 20
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    s << "<text x=\"18\" y=\"" << (yt + yb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (yt + yb) / 2 << ")\">" << ylabel << "</text>\n";
}

const char* verdict_colour(Verdict v) {
    switch (v) {
    case Verdict::stable:
        return "#2b8a3e";
    case Verdict::unstable:
        return "#e9ecef";
    case Verdict::no_orbit:
        return "#ffffff";
    default:
        return "#e03131";
    }
}

// Cell edges halfway between neighbouring axis values.
std::vector<double> edges(const std::vector<double>& axis) {
    std::vector<double> e(axis.size() + 1);
    if (axis.size() == 1) {
        e[0] = axis[0] - 0.5;
        e[1] = axis[0] + 0.5;
        return e;
    }
    for (std::size_t i = 1; i < axis.size(); ++i)
        e[i] = 0.5 * (axis[i - 1] + axis[i]);
    e.front() = axis.front() - (e[1] - axis.front());
    e.back() = axis.back() + (axis.back() - e[axis.size() - 1]);
    return e;
}

} // namespace

std::string region_svg(const StabilityChart& chart) {
    std::ostringstream s;
    svg_open(s, "stability region, mu = " + format_double(chart.mu));
    if (chart.A_axis.empty() || chart.a_axis.empty()) {
        s << "</svg>\n";
        return s.str();
    }
    const auto eA = edges(chart.A_axis);
    const auto ea = edges(chart.a_axis);
    const Frame f = make_frame(eA.front(), eA.back(), ea.front(), ea.back());
    for (std::size_t i = 0; i < chart.A_axis.size(); ++i) {
        for (std::size_t j = 0; j < chart.a_axis.size(); ++j) {
            const ChartCell& c = chart.at(i, j);
            const double x = f.px(eA[i]);
            const double y = f.py(ea[j + 1]);
            s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << f.px(eA[i + 1]) - x
              << "\" height=\"" << f.py(ea[j]) - y << "\" fill=\"" << verdict_colour(c.verdict)
              << "\"/>\n";
        }
    }
    svg_axes(s, f, "A (rad)", "a");
    s << "</svg>\n";
    return s.str();
}

std::string curves_svg(const std::vector<StabilityChart>& curves) {
    static const char* palette[] = {"#1971c2", "#e8590c", "#2f9e44", "#9c36b5", "#c2255c"};
    std::ostringstream s;
    svg_open(s, "critical amplitude a*(A)");
    double x0 = kInfinity, x1 = -kInfinity, y0 = kInfinity, y1 = -kInfinity;
    for (const auto& c : curves) {
        for (const auto& cell : c.cells) {
            x0 = std::min(x0, cell.A);
            x1 = std::max(x1, cell.A);
            y0 = std::min(y0, cell.a);
            y1 = std::max(y1, cell.a);
        }
    }
    if (!std::isfinite(x0)) {
        s << "</svg>\n";
        return s.str();
    }
    const Frame f = make_frame(x0, x1, y0, y1);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const char* colour = palette[k % std::size(palette)];
        s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (const auto& cell : curves[k].cells)
            s << f.px(cell.A) << ',' << f.py(cell.a) << ' ';
        s << "\"/>\n";
        s << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 * (k + 1) << "\" fill=\"" << colour
          << "\">mu = " << format_double(curves[k].mu) << "</text>\n";
    }
    svg_axes(s, f, "A (rad)", "a*");
    s << "</svg>\n";
    return s.str();
}

std::string bifurcation_svg(const std::vector<BifurcationEntry>& scan, double A, double mu) {
    std::ostringstream s;
    svg_open(s, "periodic orbits, A = " + format_double(A) + ", mu = " + format_double(mu));
    double x0 = kInfinity, x1 = -kInfinity, y0 = kInfinity, y1 = -kInfinity;
    for (const auto& e : scan) {
        x0 = std::min(x0, e.a);
        x1 = std::max(x1, e.a);
        for (const auto& o : e.orbits) {
            y0 = std::min(y0, o.phi0);
            y1 = std::max(y1, o.phi0);
        }
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) {
        s << "</svg>\n";
        return s.str();
    }
    const double pad = std::max(0.05, 0.1 * (y1 - y0));
    const Frame f = make_frame(x0, x1, y0 - pad, y1 + pad);
    for (const auto& e : scan) {
        for (const auto& o : e.orbits) {
            const bool stable = o.stability == Stability::stable;
            s << "<circle cx=\"" << f.px(e.a) << "\" cy=\"" << f.py(o.phi0) << "\" r=\"4\" fill=\""
              << (stable ? "#2b8a3e" : "white") << "\" stroke=\""
              << (stable ? "#2b8a3e" : "#e03131") << "\"/>\n";
        }
    }
    svg_axes(s, f, "a", "phi0 (rad)");
    s << "</svg>\n";
    return s.str();
}

} // namespace kapitza
