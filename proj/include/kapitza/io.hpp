// JSON, CSV and SVG surfaces.
#pragma once

#include "kapitza/analysis.hpp"
#include "kapitza/conditions.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace kapitza {

using json = nlohmann::json;

// Forcing: {"type": "zero" | "harmonic" | "fourier" | "sampled" | "inverse", ...}
// (schema in docs/forcing.schema.json). Parsing errors throw DomainError.
[[nodiscard]] json forcing_to_json(const Forcing& f);
[[nodiscard]] Forcing forcing_from_json(const json& j);

[[nodiscard]] json trajectory_to_json(const ReferenceTrajectory& traj);
[[nodiscard]] ReferenceTrajectory trajectory_from_json(const json& j);

[[nodiscard]] json params_to_json(const Params& p);
[[nodiscard]] json orbit_to_json(const PeriodicOrbit& orbit);
[[nodiscard]] json torres_to_json(const TorresVerdict& v);
[[nodiscard]] json critical_angles_to_json(const CriticalAngles& c);
[[nodiscard]] json bifurcation_to_json(const std::vector<BifurcationEntry>& scan, double A,
                                       double mu, const std::string& family_id);

/// Header `A,a,verdict,max_multiplier_abs,phi0,p0`, one row per cell.
void write_chart_csv(std::ostream& out, const StabilityChart& chart);

/// Header `t,phi,p`.
void write_trajectory_csv(std::ostream& out, const std::vector<Sample>& samples);

/// Shortest round-trip decimal form (%.17g).
[[nodiscard]] std::string format_double(double v);

// SVG 1.1 renderings.
[[nodiscard]] std::string region_svg(const StabilityChart& chart);
[[nodiscard]] std::string curves_svg(const std::vector<StabilityChart>& curves);
[[nodiscard]] std::string bifurcation_svg(const std::vector<BifurcationEntry>& scan, double A,
                                          double mu);

} // namespace kapitza
