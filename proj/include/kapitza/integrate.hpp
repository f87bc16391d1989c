#pragma once

#include "kapitza/dynamics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace kapitza {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.25;
    double initial_step = 1e-2;
    std::size_t max_steps = 2'000'000;

    /// Tolerances used when refining orbits (1e-10).
    static IntegratorConfig refinement();
    /// Tolerances used for residual grid scans (1e-8).
    static IntegratorConfig scan();
    static IntegratorConfig with_tolerance(double tol);

    void validate() const;
};

struct Sample {
    double t = 0.0;
    double phi = 0.0;
    double p = 0.0;
};

struct FlowResult {
    State final_state;
    /// d state(T) / d state(0), when requested.
    std::optional<Mat2> variational;
    std::size_t steps_taken = 0;
    std::vector<Sample> dense_samples;
};

/// Adaptive Dormand-Prince 5(4) integration of `field` from s0 over duration T.
///
/// With `want_variational` the 2x2 variational matrix M' = J M, M(0) = I is
/// integrated alongside the state and included in the error control. For the
/// original field J comes from central differences of rhs_original and the
/// step is capped at epsilon/20.
///
/// `sample_times` are absolute times in [s0.t, s0.t + T], ascending; the
/// integrator lands on each of them exactly.
///
/// Throws StepBudgetExceeded, StepUnderflow, NonFiniteState, DomainError.
[[nodiscard]] FlowResult flow(const State& s0, double T, Field field, const Params& params,
                              const Forcing& f, const IntegratorConfig& cfg,
                              bool want_variational = false,
                              std::span<const double> sample_times = {});

/// Classical RK4 with step T/n_steps. Bitwise deterministic. When
/// `record_every` > 0 every record_every-th step (and the start) is stored in
/// dense_samples.
[[nodiscard]] FlowResult flow_fixed(const State& s0, double T, std::size_t n_steps,
                                    Field field, const Params& params, const Forcing& f,
                                    bool want_variational = false,
                                    std::size_t record_every = 0);

} // namespace kapitza
