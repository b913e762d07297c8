#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "invis/construction.hpp"
#include "invis/geom2d.hpp"

namespace invis {

/// Numerical slack of tracing and classification. All lengths are relative to the body scale c.
struct Tolerances {
    double intersection_eps = 1e-9;  // minimum advance along a ray after a reflection
    double tie_eps = 1e-12;          // two pieces hit within this distance count as a corner hit
    double angle = 1e-9;             // exit-direction deviation, radians
    double offset = 1e-9;            // exit-line distance from O
    double boundary_band = 1e-9;     // membership tri-state band

    void validate() const {
        for (double v : {intersection_eps, tie_eps, angle, offset, boundary_band})
            if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("tolerances must be positive and finite");
    }
};

inline constexpr int kDefaultMaxBounces = 8;

template <class V>
struct HitRecord {
    std::size_t arc_index = 0;
    ArcKind kind = ArcKind::FlatSegment;
    ArcRole role = ArcRole::EdgeK1;
    V point{};
    V normal{};
    double t = 0.0;
    bool grazing = false;
};

enum class TraceStatus { Exited, MaxBounces };

template <class V>
struct BasicRay {
    V origin{};
    V direction{};
};

template <class V>
struct Trajectory {
    BasicRay<V> initial;
    std::vector<HitRecord<V>> hits;
    BasicRay<V> exit;
    TraceStatus status = TraceStatus::Exited;
    int max_bounces = kDefaultMaxBounces;

    std::size_t bounce_count() const { return hits.size(); }
    bool grazing() const {
        for (const auto& h : hits)
            if (h.grazing) return true;
        return false;
    }
};

using Trajectory2 = Trajectory<Vec2>;
using Trajectory3 = Trajectory<Vec3>;

/// Multi-bounce tracer over an arbitrary set of mirror pieces (body coordinates).
inline Trajectory2 trace_arcs(std::span<const BoundaryArc> arcs, double scale, const Ray2& ray, int max_bounces,
                              const Tolerances& tol = {}) {
    if (max_bounces < 1) throw std::invalid_argument("trace: max_bounces must be at least 1");
    if (!is_unit(ray.direction, 1e-9)) throw std::invalid_argument("trace: direction must be a unit vector");
    Trajectory2 traj;
    traj.initial = {ray.origin, ray.direction};
    traj.max_bounces = max_bounces;
    const double eps = tol.intersection_eps * scale;
    const double tie = tol.tie_eps * scale;

    Ray2 cur = ray;
    for (;;) {
        std::optional<Hit> best;
        std::size_t best_index = 0;
        double runner_up = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            const auto h = arcs[i].intersect(cur, eps);
            if (!h) continue;
            if (!best || h->t < best->t) {
                if (best) runner_up = best->t;
                best = h;
                best_index = i;
            } else {
                runner_up = std::min(runner_up, h->t);
            }
        }
        if (!best) break;
        if (static_cast<int>(traj.hits.size()) >= max_bounces) {
            traj.status = TraceStatus::MaxBounces;
            break;
        }
        const BoundaryArc& arc = arcs[best_index];
        HitRecord<Vec2> rec;
        rec.arc_index = best_index;
        rec.kind = arc.kind;
        rec.role = arc.role;
        rec.point = best->point;
        rec.normal = best->normal;
        rec.t = best->t;
        rec.grazing = best->grazing || runner_up - best->t <= tie;
        traj.hits.push_back(rec);
        cur = Ray2{best->point, normalized(reflect_direction(cur.direction, best->normal))};
    }
    traj.exit = {cur.origin, cur.direction};
    return traj;
}

inline Trajectory2 trace2d(const Body2D& body, const Ray2& ray, int max_bounces = kDefaultMaxBounces,
                           const Tolerances& tol = {}) {
    if (body.contains(ray.origin)) throw std::invalid_argument("trace2d: ray origin lies inside the body");
    return trace_arcs(body.arcs, body.scale(), ray, max_bounces, tol);
}

/// Orthonormal pair (axis, radial) spanning the meridian plane that contains `direction`.
struct MeridianFrame {
    Vec3 axis;
    Vec3 radial;

    Vec2 to_plane(Vec3 v, BodyKind kind) const {
        const double ax = dot(v, axis), rad = dot(v, radial);
        return kind == BodyKind::G1 ? Vec2{ax, rad} : Vec2{rad, ax};
    }
    Vec3 to_space(Vec2 q, BodyKind kind) const {
        const double ax = kind == BodyKind::G1 ? q.x : q.y;
        const double rad = kind == BodyKind::G1 ? q.y : q.x;
        return axis * ax + radial * rad;
    }
};

inline MeridianFrame meridian_frame(const Body3D& body, Vec3 direction) {
    const Vec3 axis = body.axis();
    const Vec3 perp = direction - axis * dot(direction, axis);
    const double n = norm(perp);
    if (n > 1e-15) return {axis, perp / n};
    // along the axis every meridian plane contains the ray
    return {axis, body.kind == BodyKind::G1 ? Vec3{0, 1, 0} : Vec3{1, 0, 0}};
}

/// Traces a ray from O by reducing to the meridian section; exact because O lies on the axis
/// and surface normals of a revolution surface stay in the meridian plane.
inline Trajectory3 trace3d(const Body3D& body, Vec3 direction, int max_bounces = kDefaultMaxBounces,
                           const Tolerances& tol = {}) {
    if (!(norm(direction) > 0.0)) throw std::invalid_argument("trace3d: zero direction");
    if (!is_unit(direction, 1e-9)) throw std::invalid_argument("trace3d: direction must be a unit vector");
    const MeridianFrame mf = meridian_frame(body, direction);
    const Vec2 d2 = normalized(mf.to_plane(direction, body.kind));
    const Trajectory2 t2 = trace_arcs(body.meridian, body.scale(), Ray2{{0.0, 0.0}, d2}, max_bounces, tol);

    Trajectory3 out;
    out.initial = {{0, 0, 0}, direction};
    out.status = t2.status;
    out.max_bounces = t2.max_bounces;
    out.hits.reserve(t2.hits.size());
    for (const auto& h : t2.hits) {
        HitRecord<Vec3> r;
        r.arc_index = h.arc_index;
        r.kind = h.kind;
        r.role = h.role;
        r.point = mf.to_space(h.point, body.kind);
        r.normal = mf.to_space(h.normal, body.kind);
        r.t = h.t;
        r.grazing = h.grazing;
        out.hits.push_back(r);
    }
    out.exit = {mf.to_space(t2.exit.origin, body.kind), normalized(mf.to_space(t2.exit.direction, body.kind))};
    return out;
}

}  // namespace invis
