#pragma once

#include "kapitza/trajectory.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kapitza {

struct Params;

namespace forcing {

struct Zero {
    friend bool operator==(const Zero&, const Zero&) = default;
};

/// F(t) = amplitude * cos(t + phase)
struct Harmonic {
    double amplitude = 0.0;
    double phase = 0.0;
    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// F(t) = sum_n cos[n] cos(n t) + sin[n] sin(n t), n starting at 0
/// (cos[0] is the constant term, sin[0] is ignored).
struct Fourier {
    std::vector<double> cos;
    std::vector<double> sin;
    friend bool operator==(const Fourier&, const Fourier&) = default;
};

/// Periodic cubic spline through values[j] at t_j = 2*pi*j/N.
class Sampled {
public:
    Sampled() = default;
    explicit Sampled(std::vector<double> values);

    [[nodiscard]] double operator()(double t_reduced) const noexcept;
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] Sampled scaled(double k) const;

    friend bool operator==(const Sampled& l, const Sampled& r) { return l.values_ == r.values_; }

private:
    std::vector<double> values_;
    std::vector<double> second_; // spline second derivatives at the nodes
    double h_ = 0.0;
};

/// Force that makes `trajectory` an exact solution of the averaged system for
/// the (mu, a) it was built with.
struct InverseDerived {
    ReferenceTrajectory trajectory;
    double mu = 0.0;
    double a = 0.0;
    friend bool operator==(const InverseDerived&, const InverseDerived&) = default;
};

} // namespace forcing

/// A 2*pi-periodic horizontal force F(t). Immutable value type.
class Forcing {
public:
    using Variant = std::variant<forcing::Zero, forcing::Harmonic, forcing::Fourier,
                                 forcing::Sampled, forcing::InverseDerived>;

    Forcing() = default;
    Forcing(Variant v);

    static Forcing zero() { return Forcing{}; }
    static Forcing harmonic(double amplitude, double phase = 0.0);
    static Forcing fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    static Forcing sampled(std::vector<double> values);

    /// F(t). t is reduced modulo 2*pi before any arithmetic.
    [[nodiscard]] double operator()(double t) const noexcept;

    /// max |F| over one period: 4096-point grid, then Brent refinement around
    /// the best node.
    [[nodiscard]] double max_abs() const;

    /// F -> -F.
    [[nodiscard]] Forcing reflected() const;

    /// k * F. Not defined for inverse-derived forces.
    [[nodiscard]] Forcing scaled(double k) const;

    /// Throws DomainError when an inverse-derived force is used with a
    /// (mu, a) different from its construction snapshot.
    void require_compatible(const Params& params) const;

    [[nodiscard]] std::string_view type_name() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] const Variant& variant() const noexcept { return v_; }

    friend bool operator==(const Forcing&, const Forcing&) = default;

private:
    Variant v_{forcing::Zero{}};
};

/// One-parameter force family F(t; A) = A * shape(t). The default shape is
/// cos t.
struct ForcingFamily {
    Forcing shape = Forcing::harmonic(1.0, 0.0);
    std::string id = "harmonic";

    [[nodiscard]] Forcing at(double amplitude) const { return shape.scaled(amplitude); }
    static ForcingFamily harmonic(double phase = 0.0);
};

} // namespace kapitza
