#include "kapitza/integrate.hpp"

#include "kapitza/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace kapitza {

IntegratorConfig IntegratorConfig::refinement() {
    return with_tolerance(1e-10);
}

IntegratorConfig IntegratorConfig::scan() {
    return with_tolerance(1e-8);
}

IntegratorConfig IntegratorConfig::with_tolerance(double tol) {
    IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol;
    return cfg;
}

void IntegratorConfig::validate() const {
    std::ostringstream msg;
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        msg << "integrator tolerances must be > 0";
    else if (!(max_step > 0.0))
        msg << "max_step must be > 0";
    else if (!(initial_step > 0.0))
        msg << "initial_step must be > 0";
    else if (max_steps < 1)
        msg << "max_steps must be >= 1";
    else
        return;
    throw DomainError(msg.str());
}

namespace {

template <std::size_t N>
using Vec = std::array<double, N>;

// State plus optional column-major variational matrix.
template <std::size_t N>
struct System {
    Field field;
    const Params& params;
    const Forcing& f;

    Vec<N> operator()(double t, const Vec<N>& y) const {
        const State s{y[0], y[1], t};
        const Rates r = rhs(field, s, params, f);
        Vec<N> dy{};
        dy[0] = r.dphi;
        dy[1] = r.dp;
        if constexpr (N == 6) {
            const Mat2 j = field == Field::averaged ? jacobian_averaged(s, params, f)
                                                    : jacobian_original(s, params, f);
            for (int c = 0; c < 2; ++c) {
                const double m0 = y[2 + 2 * c];
                const double m1 = y[3 + 2 * c];
                dy[2 + 2 * c] = j(0, 0) * m0 + j(0, 1) * m1;
                dy[3 + 2 * c] = j(1, 0) * m0 + j(1, 1) * m1;
            }
        }
        return dy;
    }
};

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0)
            continue;
        for (std::size_t i = 0; i < N; ++i)
            out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
Vec<N> initial_vector(const State& s0) {
    Vec<N> y{};
    y[0] = s0.phi;
    y[1] = s0.p;
    if constexpr (N == 6) {
        y[2] = 1.0;
        y[5] = 1.0;
    }
    return y;
}

template <std::size_t N>
void store_result(FlowResult& out, const Vec<N>& y, double t) {
    out.final_state = State{y[0], y[1], t};
    if constexpr (N == 6) {
        Mat2 m;
        m << y[2], y[4], y[3], y[5];
        out.variational = m;
    }
}

void check_inputs(const State& s0, double T, Field field, const Params& params,
                  const Forcing& f) {
    params.validate();
    f.require_compatible(params);
    if (!s0.finite())
        throw NonFiniteState("initial state is not finite");
    if (!std::isfinite(T) || T < 0.0)
        throw DomainError("integration duration must be finite and >= 0");
    if (field == Field::original && !params.commensurable())
        throw DomainError("original system requires 1/epsilon to be a positive integer");
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size controller.
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;
constexpr double kMinStep = 1e-14;

template <std::size_t N>
FlowResult dopri(const State& s0, double T, Field field, const Params& params, const Forcing& f,
                 const IntegratorConfig& cfg, std::span<const double> sample_times) {
    const System<N> sys{field, params, f};
    const double t0 = s0.t;
    const double t_end = t0 + T;

    std::vector<double> stops(sample_times.begin(), sample_times.end());
    for (std::size_t i = 0; i < stops.size(); ++i) {
        if (!(stops[i] >= t0 && stops[i] <= t_end) || (i > 0 && stops[i] < stops[i - 1]))
            throw DomainError("sample_times must be ascending and inside [t0, t0 + T]");
    }
    const std::size_t n_samples = stops.size();
    stops.push_back(t_end);

    double max_step = cfg.max_step;
    if (field == Field::original)
        max_step = std::min(max_step, params.epsilon / 20.0);

    FlowResult out;
    out.dense_samples.reserve(n_samples);
    Vec<N> y = initial_vector<N>(s0);
    double t = t0;
    double h = std::min(cfg.initial_step, max_step);
    double err_prev = 1e-4;
    std::size_t attempts = 0;
    Vec<N> k1 = sys(t, y);

    for (std::size_t idx = 0; idx < stops.size();) {
        const double target = stops[idx];
        if (t >= target) {
            if (idx < n_samples)
                out.dense_samples.push_back({t, y[0], y[1]});
            ++idx;
            continue;
        }
        const double remaining = target - t;
        const bool landing = std::min(h, max_step) >= remaining;
        const double step = landing ? remaining : std::min(h, max_step);

        if (++attempts > cfg.max_steps) {
            std::ostringstream msg;
            msg << "step budget of " << cfg.max_steps << " exceeded at t = " << t;
            throw StepBudgetExceeded(msg.str());
        }

        const Vec<N> k2 = sys(t + c2 * step, axpy<N>(y, step, {{a21, &k1}}));
        const Vec<N> k3 = sys(t + c3 * step, axpy<N>(y, step, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 =
            sys(t + c4 * step, axpy<N>(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = sys(t + c5 * step,
                              axpy<N>(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 = sys(
            t + step, axpy<N>(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y5 = axpy<N>(
            y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double t_new = landing ? target : t + step;
        const Vec<N> k7 = sys(t_new, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                     e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (std::isfinite(err) && err <= 1.0) {
            if (!all_finite<N>(y5)) {
                std::ostringstream msg;
                msg << "non-finite state at t = " << t_new;
                throw NonFiniteState(msg.str());
            }
            double fac = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
            fac = std::clamp(fac, kFacMin, kFacMax);
            err_prev = std::max(err, 1e-4);
            const double h_next = step * fac;
            h = landing ? std::max(h, h_next) : h_next;
            t = t_new;
            y = y5;
            k1 = k7;
            ++out.steps_taken;
        } else {
            const double fac =
                std::isfinite(err) ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
            h = step * fac;
            if (h < kMinStep) {
                std::ostringstream msg;
                msg << "step size fell below " << kMinStep << " at t = " << t;
                throw StepUnderflow(msg.str());
            }
        }
    }
    store_result<N>(out, y, t_end);
    return out;
}

template <std::size_t N>
FlowResult rk4(const State& s0, double T, std::size_t n_steps, Field field, const Params& params,
               const Forcing& f, std::size_t record_every) {
    const System<N> sys{field, params, f};
    const double h = T / static_cast<double>(n_steps);
    FlowResult out;
    Vec<N> y = initial_vector<N>(s0);
    if (record_every > 0)
        out.dense_samples.push_back({s0.t, y[0], y[1]});
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = s0.t + static_cast<double>(i) * h;
        const Vec<N> k1 = sys(t, y);
        const Vec<N> k2 = sys(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k1}}));
        const Vec<N> k3 = sys(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k2}}));
        const Vec<N> k4 = sys(t + h, axpy<N>(y, h, {{1.0, &k3}}));
        y = axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
        if (!all_finite<N>(y)) {
            std::ostringstream msg;
            msg << "non-finite state at t = " << t + h;
            throw NonFiniteState(msg.str());
        }
        ++out.steps_taken;
        if (record_every > 0 && ((i + 1) % record_every == 0 || i + 1 == n_steps))
            out.dense_samples.push_back({s0.t + static_cast<double>(i + 1) * h, y[0], y[1]});
    }
    store_result<N>(out, y, s0.t + T);
    return out;
}

} // namespace

FlowResult flow(const State& s0, double T, Field field, const Params& params, const Forcing& f,
                const IntegratorConfig& cfg, bool want_variational,
                std::span<const double> sample_times) {
    check_inputs(s0, T, field, params, f);
    cfg.validate();
    return want_variational ? dopri<6>(s0, T, field, params, f, cfg, sample_times)
                            : dopri<2>(s0, T, field, params, f, cfg, sample_times);
}

FlowResult flow_fixed(const State& s0, double T, std::size_t n_steps, Field field,
                      const Params& params, const Forcing& f, bool want_variational,
                      std::size_t record_every) {
    check_inputs(s0, T, field, params, f);
    if (n_steps < 1)
        throw DomainError("n_steps must be >= 1");
    if (field == Field::original &&
        static_cast<double>(n_steps) < 20.0 * T / params.epsilon - 1e-9)
        throw DomainError("fixed-step original integration needs n_steps >= 20 T / epsilon");
    return want_variational ? rk4<6>(s0, T, n_steps, field, params, f, record_every)
                            : rk4<2>(s0, T, n_steps, field, params, f, record_every);
}

} // namespace kapitza
