#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bhrt/errors.hpp"
#include "bhrt/vec3.hpp"

namespace bhrt {

/// Geometric units, G = c = 1: mass has units of length and the
/// Schwarzschild radius is 2*mass. mass == 0 is the flat-space limit.
struct BlackHole {
    double mass = 1.0;
    Vec3 center;

    double schwarzschild_radius() const { return 2.0 * mass; }
};

/// Orthonormal in-plane frame for one ray. World position of the polar
/// point (r, phi) is origin + r*(cos(phi)*e1 + sin(phi)*e2).
struct OrbitalPlaneBasis {
    Vec3 e1;      // from hole center toward the ray origin
    Vec3 e2;      // in-plane, oriented along the ray's initial angular motion
    Vec3 origin;  // hole center

    Vec3 point(double r, double phi) const;
};

/// Integration state of the light-bending ODE: u = 1/r as a function of
/// the azimuthal angle phi, plus its phi-derivative.
struct GeodesicState {
    double phi = 0.0;
    double u = 0.0;
    double du_dphi = 0.0;
};

struct TraceConfig {
    double epsilon = 0.05;        // target Euclidean length of a polyline segment
    double escape_radius = 1e4;   // beyond this the ray is treated as straight
    int max_windings = 10;        // full turns of phi before the ray counts as stalled
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
};

/// Escape radius used when none is configured explicitly:
/// max(1e4 * mass, 2 * camera_distance).
double default_escape_radius(double mass, double camera_distance);

struct TraceOutcome {
    enum class Kind { Captured, Escaped, Stalled };

    Kind kind = Kind::Captured;
    Vec3 escape_direction;  // unit; meaningful only when kind == Escaped

    static TraceOutcome captured() { return {Kind::Captured, {}}; }
    static TraceOutcome escaped(const Vec3& dir) { return {Kind::Escaped, dir}; }
    static TraceOutcome stalled() { return {Kind::Stalled, {}}; }
};

struct RayPolyline {
    std::vector<Vec3> points;
    TraceOutcome outcome;
};

/// Adaptive step fell below 1e-14 in phi. Carries the state at the failure
/// point so callers can convert a horizon approach into a capture.
struct StepSizeUnderflow : NumericalError {
    GeodesicState state;

    explicit StepSizeUnderflow(const GeodesicState& s)
        : NumericalError("adaptive step size underflow near u = " + std::to_string(s.u)),
          state(s) {}
};

/// Right-hand side of u'' = 3*M*u^2 - u, as (du/dphi, d2u/dphi2).
std::pair<double, double> ode_rhs(const GeodesicState& state, double mass);

/// Orbital-plane frame for a ray, or nullopt when the ray is radial
/// (direction parallel to the center-origin line within 1e-12). Radial rays
/// are classified analytically by trace().
std::optional<OrbitalPlaneBasis> plane_basis(const Vec3& ray_origin, const Vec3& ray_dir,
                                             const BlackHole& hole);

/// State at phi = 0 matching the straight-line ray through (origin, dir):
/// u = 1/r0, du/dphi = -(v.d)/(r0*b) with v = origin - center, b = |v x d|.
GeodesicState initial_conditions(const Vec3& ray_origin, const Vec3& ray_dir,
                                 const BlackHole& hole);

/// Angular extent of the next polyline segment: clamp(epsilon*u, 1e-6, 0.1),
/// so the transverse arc length r*dphi tracks epsilon.
double step_dphi(const GeodesicState& state, const TraceConfig& cfg);

/// Advances the ODE solution by exactly dphi with an embedded Dormand-
/// Prince 5(4) pair under PI step control; per-step local error is kept
/// within abs_tol + rel_tol*|y|. step_hint, when given, carries the
/// accepted step size across windows. Throws StepSizeUnderflow when the
/// step falls below 1e-14.
GeodesicState integrate_window(const GeodesicState& state, double dphi, double mass,
                               const TraceConfig& cfg, double* step_hint = nullptr);

/// Integrates one camera ray into a world-space polyline. Termination:
/// Captured once u >= 1/(2*mass); Escaped once r >= escape_radius while
/// moving outward (direction = final segment); Stalled past
/// 2*pi*max_windings of accumulated phi.
RayPolyline trace(const Vec3& ray_origin, const Vec3& ray_dir, const BlackHole& hole,
                  const TraceConfig& cfg);

/// Total in-plane turning of a traced ray, winding-aware (radians).
/// Throws NumericalError unless the ray escapes.
double deflection_of_ray(const Vec3& ray_origin, const Vec3& ray_dir, const BlackHole& hole,
                         const TraceConfig& cfg);

/// Deflection for the canonical geometry with impact parameter b: launch
/// from r = escape_radius, travel direction perpendicular to the offset.
double deflection_angle(double b, const BlackHole& hole, const TraceConfig& cfg);

/// First integral of the light-bending ODE: u'^2 + u^2 - 2*M*u^3,
/// constant along exact solutions.
double conserved_energy(const GeodesicState& state, double mass);

}  // namespace bhrt
