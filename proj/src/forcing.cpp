#include "kapitza/forcing.hpp"

#include "kapitza/dynamics.hpp"
#include "kapitza/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kapitza {

namespace forcing {

namespace {

// Solves the cyclic system x[j-1] + 4 x[j] + x[j+1] = rhs[j] (Sherman-Morrison).
std::vector<double> solve_cyclic_141(std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] = 4.0 - gamma;
    diag[n - 1] = 4.0 - 1.0 / gamma;

    auto thomas = [&](std::vector<double> r) {
        std::vector<double> c(n, 0.0);
        std::vector<double> x(n, 0.0);
        double beta = diag[0];
        x[0] = r[0] / beta;
        for (std::size_t j = 1; j < n; ++j) {
            c[j] = 1.0 / beta;
            beta = diag[j] - c[j];
            x[j] = (r[j] - x[j - 1]) / beta;
        }
        for (std::size_t j = n - 1; j-- > 0;)
            x[j] -= c[j + 1] * x[j + 1];
        return x;
    };

    std::vector<double> x = thomas(std::move(rhs));
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const std::vector<double> z = thomas(std::move(u));
    const double fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    for (std::size_t j = 0; j < n; ++j)
        x[j] -= fact * z[j];
    return x;
}

} // namespace

Sampled::Sampled(std::vector<double> values) : values_(std::move(values)) {
    const std::size_t n = values_.size();
    if (n < 8)
        throw DomainError("sampled forcing needs at least 8 nodes");
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw DomainError("sampled forcing values must be finite");
    h_ = kTwoPi / static_cast<double>(n);
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double prev = values_[(j + n - 1) % n];
        const double next = values_[(j + 1) % n];
        rhs[j] = 6.0 / (h_ * h_) * (next - 2.0 * values_[j] + prev);
    }
    second_ = solve_cyclic_141(std::move(rhs));
}

double Sampled::operator()(double t) const noexcept {
    const std::size_t n = values_.size();
    auto j = static_cast<std::size_t>(t / h_);
    if (j >= n)
        j = n - 1;
    const std::size_t k = (j + 1) % n;
    const double u = t - static_cast<double>(j) * h_;
    const double w = h_ - u;
    return second_[j] * w * w * w / (6.0 * h_) + second_[k] * u * u * u / (6.0 * h_) +
           (values_[j] / h_ - second_[j] * h_ / 6.0) * w +
           (values_[k] / h_ - second_[k] * h_ / 6.0) * u;
}

Sampled Sampled::scaled(double k) const {
    Sampled s = *this;
    for (auto& v : s.values_)
        v *= k;
    for (auto& m : s.second_)
        m *= k;
    return s;
}

} // namespace forcing

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double inverse_force_value(const forcing::InverseDerived& inv, double t) {
    const auto& tr = inv.trajectory;
    const double phi = tr.phi(t);
    const double num = tr.ddphi(t) + std::sin(phi) + inv.mu * tr.dphi(t) +
                       0.25 * inv.a * inv.a * std::sin(2.0 * phi);
    return num / std::cos(phi);
}

} // namespace

Forcing::Forcing(Variant v) : v_(std::move(v)) {
    if (const auto* h = std::get_if<forcing::Harmonic>(&v_)) {
        if (!std::isfinite(h->amplitude) || !std::isfinite(h->phase))
            throw DomainError("harmonic forcing parameters must be finite");
    }
    if (const auto* f = std::get_if<forcing::Fourier>(&v_)) {
        const auto finite = [](double x) { return std::isfinite(x); };
        if (!std::all_of(f->cos.begin(), f->cos.end(), finite) ||
            !std::all_of(f->sin.begin(), f->sin.end(), finite))
            throw DomainError("fourier forcing coefficients must be finite");
    }
}

Forcing Forcing::harmonic(double amplitude, double phase) {
    return Forcing{forcing::Harmonic{amplitude, phase}};
}

Forcing Forcing::fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    return Forcing{forcing::Fourier{std::move(cos_coeffs), std::move(sin_coeffs)}};
}

Forcing Forcing::sampled(std::vector<double> values) {
    return Forcing{forcing::Sampled{std::move(values)}};
}

double Forcing::operator()(double t) const noexcept {
    const double r = reduce_period(t);
    return std::visit(
        overloaded{
            [](const forcing::Zero&) { return 0.0; },
            [r](const forcing::Harmonic& h) { return h.amplitude * std::cos(r + h.phase); },
            [r](const forcing::Fourier& f) {
                double v = 0.0;
                const std::size_t n = std::max(f.cos.size(), f.sin.size());
                for (std::size_t k = 0; k < n; ++k) {
                    const double kk = static_cast<double>(k);
                    if (k < f.cos.size())
                        v += f.cos[k] * std::cos(kk * r);
                    if (k > 0 && k < f.sin.size())
                        v += f.sin[k] * std::sin(kk * r);
                }
                return v;
            },
            [r](const forcing::Sampled& s) { return s(r); },
            [r](const forcing::InverseDerived& inv) { return inverse_force_value(inv, r); },
        },
        v_);
}

double Forcing::max_abs() const {
    if (is_zero())
        return 0.0;
    if (const auto* h = std::get_if<forcing::Harmonic>(&v_))
        return std::abs(h->amplitude);

    constexpr int n = 4096;
    constexpr double dt = kTwoPi / n;
    int best = 0;
    double best_val = -1.0;
    for (int j = 0; j < n; ++j) {
        const double v = std::abs((*this)(j * dt));
        if (v > best_val) {
            best_val = v;
            best = j;
        }
    }
    const double centre = best * dt;
    auto neg_abs = [this](double t) { return -std::abs((*this)(t)); };
    const auto [t_opt, v_opt] =
        boost::math::tools::brent_find_minima(neg_abs, centre - dt, centre + dt, 40);
    (void)t_opt;
    return std::max(best_val, -v_opt);
}

Forcing Forcing::reflected() const {
    return std::visit(overloaded{
                          [](const forcing::Zero& z) { return Forcing{z}; },
                          [](const forcing::Harmonic& h) {
                              return Forcing::harmonic(-h.amplitude, h.phase);
                          },
                          [this](const auto&) { return scaled(-1.0); },
                          [](const forcing::InverseDerived& inv) {
                              return Forcing{forcing::InverseDerived{inv.trajectory.reflected(),
                                                                     inv.mu, inv.a}};
                          },
                      },
                      v_);
}

Forcing Forcing::scaled(double k) const {
    return std::visit(overloaded{
                          [](const forcing::Zero& z) { return Forcing{z}; },
                          [k](const forcing::Harmonic& h) {
                              return Forcing::harmonic(k * h.amplitude, h.phase);
                          },
                          [k](const forcing::Fourier& f) {
                              forcing::Fourier g = f;
                              for (auto& c : g.cos)
                                  c *= k;
                              for (auto& s : g.sin)
                                  s *= k;
                              return Forcing{std::move(g)};
                          },
                          [k](const forcing::Sampled& s) { return Forcing{s.scaled(k)}; },
                          [](const forcing::InverseDerived&) -> Forcing {
                              throw DomainError("inverse-derived forcing cannot be rescaled");
                          },
                      },
                      v_);
}

void Forcing::require_compatible(const Params& params) const {
    if (const auto* inv = std::get_if<forcing::InverseDerived>(&v_)) {
        if (inv->mu != params.mu || inv->a != params.a) {
            std::ostringstream msg;
            msg << "inverse-derived forcing built for (mu=" << inv->mu << ", a=" << inv->a
                << ") evaluated with (mu=" << params.mu << ", a=" << params.a << ")";
            throw DomainError(msg.str());
        }
    }
}

std::string_view Forcing::type_name() const noexcept {
    switch (v_.index()) {
    case 0:
        return "zero";
    case 1:
        return "harmonic";
    case 2:
        return "fourier";
    case 3:
        return "sampled";
    default:
        return "inverse";
    }
}

bool Forcing::is_zero() const noexcept {
    return std::holds_alternative<forcing::Zero>(v_);
}

ForcingFamily ForcingFamily::harmonic(double phase) {
    ForcingFamily fam;
    fam.shape = Forcing::harmonic(1.0, phase);
    fam.id = phase == 0.0 ? "harmonic" : "harmonic(phase=" + std::to_string(phase) + ")";
    return fam;
}

} // namespace kapitza
