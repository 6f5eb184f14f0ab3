#include "bhrt/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bhrt {

namespace {

constexpr double kMinDphi = 1e-6;
constexpr double kMaxDphi = 0.1;
constexpr double kStepFloor = 1e-14;
constexpr double kDegenerateTol = 1e-12;

void validate(const TraceConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("trace config: epsilon must be > 0");
    if (!(cfg.escape_radius > 0.0))
        throw std::invalid_argument("trace config: escape_radius must be > 0");
    if (cfg.max_windings < 1)
        throw std::invalid_argument("trace config: max_windings must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("trace config: rel_tol must be > 0");
    if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("trace config: abs_tol must be > 0");
}

using State2 = std::array<double, 2>;  // (u, du/dphi)

inline State2 rhs(const State2& y, double mass) {
    return {y[1], 3.0 * mass * y[0] * y[0] - y[0]};
}

}  // namespace

Vec3 OrbitalPlaneBasis::point(double r, double phi) const {
    return origin + r * (std::cos(phi) * e1 + std::sin(phi) * e2);
}

double default_escape_radius(double mass, double camera_distance) {
    return std::max(1e4 * mass, 2.0 * camera_distance);
}

std::pair<double, double> ode_rhs(const GeodesicState& state, double mass) {
    return {state.du_dphi, 3.0 * mass * state.u * state.u - state.u};
}

std::optional<OrbitalPlaneBasis> plane_basis(const Vec3& ray_origin, const Vec3& ray_dir,
                                             const BlackHole& hole) {
    const Vec3 e1 = (ray_origin - hole.center).normalized();
    const Vec3 tangential = ray_dir - ray_dir.dot(e1) * e1;
    if (tangential.norm() < kDegenerateTol) return std::nullopt;
    return OrbitalPlaneBasis{e1, tangential.normalized(), hole.center};
}

GeodesicState initial_conditions(const Vec3& ray_origin, const Vec3& ray_dir,
                                 const BlackHole& hole) {
    const Vec3 v = ray_origin - hole.center;
    const double r0 = v.norm();
    const double b = v.cross(ray_dir).norm();
    if (b < kDegenerateTol)
        throw std::invalid_argument("initial_conditions: radial ray (impact parameter < 1e-12)");
    return {0.0, 1.0 / r0, -v.dot(ray_dir) / (r0 * b)};
}

double step_dphi(const GeodesicState& state, const TraceConfig& cfg) {
    return std::clamp(cfg.epsilon * state.u, kMinDphi, kMaxDphi);
}

namespace {

// Like step_dphi but accounting for radial motion, so the full arc length
// sqrt(r^2 + (dr/dphi)^2)*dphi of a segment tracks epsilon even for
// near-radial rays. Equal to step_dphi when du_dphi = 0.
double segment_dphi(const GeodesicState& state, const TraceConfig& cfg) {
    const double u = state.u;
    const double hyp = std::hypot(u, state.du_dphi);
    return std::clamp(cfg.epsilon * u * u / hyp, kMinDphi, kMaxDphi);
}

}  // namespace

GeodesicState integrate_window(const GeodesicState& state, double dphi, double mass,
                               const TraceConfig& cfg, double* step_hint) {
    if (!(dphi > 0.0)) throw std::invalid_argument("integrate_window: dphi must be > 0");

    // Dormand-Prince 5(4) coefficients (FSAL).
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // 5th-order minus 4th-order weights, for the embedded error estimate.
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State2 y = {state.u, state.du_dphi};
    State2 k1 = rhs(y, mass);

    double remaining = dphi;
    double h = (step_hint && *step_hint > 0.0) ? std::min(*step_hint, dphi) : dphi;
    double err_prev = 1e-4;

    while (remaining > 0.0) {
        const double h_try = std::min(h, remaining);

        State2 k2, k3, k4, k5, k6, k7, ynew;
        {
            State2 t;
            for (int i = 0; i < 2; ++i) t[i] = y[i] + h_try * a21 * k1[i];
            k2 = rhs(t, mass);
            for (int i = 0; i < 2; ++i) t[i] = y[i] + h_try * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(t, mass);
            for (int i = 0; i < 2; ++i)
                t[i] = y[i] + h_try * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(t, mass);
            for (int i = 0; i < 2; ++i)
                t[i] = y[i] + h_try * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(t, mass);
            for (int i = 0; i < 2; ++i)
                t[i] = y[i] +
                       h_try * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = rhs(t, mass);
            for (int i = 0; i < 2; ++i)
                ynew[i] = y[i] +
                          h_try * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = rhs(ynew, mass);
        }

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
            const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / scale) * (ei / scale);
        }
        err = std::sqrt(err / 2.0);

        if (err <= 1.0) {
            y = ynew;
            k1 = k7;  // FSAL
            remaining -= h_try;
            const double factor =
                std::clamp(0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0), 0.2, 5.0);
            h = h_try * factor;
            err_prev = std::max(err, 1e-4);
        } else {
            h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }

        if (h < kStepFloor && remaining > 0.0)
            throw StepSizeUnderflow({state.phi + (dphi - remaining), y[0], y[1]});
    }

    if (step_hint) *step_hint = h;
    return {state.phi + dphi, y[0], y[1]};
}

RayPolyline trace(const Vec3& ray_origin, const Vec3& ray_dir, const BlackHole& hole,
                  const TraceConfig& cfg) {
    validate(cfg);
    if (hole.mass < 0.0) throw std::invalid_argument("trace: mass must be >= 0");

    const Vec3 v = ray_origin - hole.center;
    const double r0 = v.norm();
    if (hole.mass > 0.0 && r0 <= hole.schwarzschild_radius())
        throw std::invalid_argument("trace: ray origin is not outside the event horizon");

    const std::optional<OrbitalPlaneBasis> basis = plane_basis(ray_origin, ray_dir, hole);
    if (!basis) {
        // Radial ray: classified analytically, no integration.
        RayPolyline poly;
        poly.points.push_back(ray_origin);
        if (ray_dir.dot(hole.center - ray_origin) > 0.0) {
            poly.points.push_back(ray_origin + (r0 - hole.schwarzschild_radius()) * ray_dir);
            poly.outcome = TraceOutcome::captured();
        } else {
            poly.points.push_back(ray_origin + cfg.escape_radius * ray_dir);
            poly.outcome = TraceOutcome::escaped(ray_dir);
        }
        return poly;
    }

    GeodesicState state = initial_conditions(ray_origin, ray_dir, hole);
    const double u_capture = hole.mass > 0.0 ? 1.0 / hole.schwarzschild_radius()
                                             : std::numeric_limits<double>::infinity();
    const double u_escape = 1.0 / cfg.escape_radius;
    const double phi_max = 2.0 * std::numbers::pi * cfg.max_windings;

    RayPolyline poly;
    poly.points.push_back(ray_origin);
    double step_hint = 0.0;

    for (;;) {
        if (state.u >= u_capture) {
            poly.outcome = TraceOutcome::captured();
            break;
        }
        if (state.u <= u_escape && state.du_dphi < 0.0) {
            if (poly.points.size() < 2) {
                // Launched at or beyond the escape radius already moving
                // outward; the trajectory out there is straight by contract.
                poly.points.push_back(ray_origin + cfg.escape_radius * ray_dir);
                poly.outcome = TraceOutcome::escaped(ray_dir);
            } else {
                const Vec3& a = poly.points[poly.points.size() - 2];
                poly.outcome = TraceOutcome::escaped((poly.points.back() - a).normalized());
            }
            break;
        }
        if (state.phi > phi_max) {
            poly.outcome = TraceOutcome::stalled();
            break;
        }

        const double dphi = segment_dphi(state, cfg);
        try {
            state = integrate_window(state, dphi, hole.mass, cfg, &step_hint);
        } catch (const StepSizeUnderflow& e) {
            if (hole.mass > 0.0 && e.state.u >= u_capture) {
                const Vec3 p = basis->point(1.0 / e.state.u, e.state.phi);
                if ((p - poly.points.back()).norm() > 0.0) poly.points.push_back(p);
                poly.outcome = TraceOutcome::captured();
                break;
            }
            throw;
        }
        if (!(state.u > 0.0))
            throw NumericalError("trace: inverse radius left the positive domain");
        poly.points.push_back(basis->point(1.0 / state.u, state.phi));
    }
    return poly;
}

double deflection_of_ray(const Vec3& ray_origin, const Vec3& ray_dir, const BlackHole& hole,
                         const TraceConfig& cfg) {
    const std::optional<OrbitalPlaneBasis> basis = plane_basis(ray_origin, ray_dir, hole);
    const RayPolyline poly = trace(ray_origin, ray_dir, hole, cfg);
    if (poly.outcome.kind != TraceOutcome::Kind::Escaped)
        throw NumericalError("deflection_angle: ray did not escape");
    if (!basis) return 0.0;  // radial escape is straight

    // Per-segment turning in the orbital plane. Individual turns are far
    // below pi, so the sum telescopes into the winding-aware total angle
    // between the first and last segment.
    double total = 0.0;
    double prev_x = 0.0, prev_y = 0.0;
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Vec3 seg = poly.points[i] - poly.points[i - 1];
        const double sx = seg.dot(basis->e1);
        const double sy = seg.dot(basis->e2);
        if (i > 1) total += std::atan2(prev_x * sy - prev_y * sx, prev_x * sx + prev_y * sy);
        prev_x = sx;
        prev_y = sy;
    }
    return std::abs(total);
}

double deflection_angle(double b, const BlackHole& hole, const TraceConfig& cfg) {
    if (!(b > 0.0) || b >= cfg.escape_radius)
        throw std::invalid_argument("deflection_angle: need 0 < b < escape_radius");
    const double r0 = cfg.escape_radius;
    const Vec3 origin = hole.center + Vec3{std::sqrt(r0 * r0 - b * b), b, 0.0};
    return deflection_of_ray(origin, {-1.0, 0.0, 0.0}, hole, cfg);
}

double conserved_energy(const GeodesicState& state, double mass) {
    const double u = state.u;
    return state.du_dphi * state.du_dphi + u * u - 2.0 * mass * u * u * u;
}

}  // namespace bhrt
