#pragma once

// Brute-force 3D tracer used to cross-check trace3d. It never touches the ray-conic solvers:
// crossings are bracketed by marching the membership test along the ray and refined by
// bisection, and normals come from 3D gradients of the implicit boundary functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "invis/billiard.hpp"
#include "invis/construction.hpp"

namespace invis {

namespace oracle_detail {

struct Constraint {
    double value;  // < 0 inside F
    Vec2 grad;     // with respect to (xi, eta)
    ArcKind kind;
    ArcRole role;
};

// The four defining inequalities of F as functions of (xi, eta).
inline std::array<Constraint, 4> constraints(const ConstructionParams& p, Vec2 q) {
    const double t = p.t, s = 1.0 + t * t;
    const double u = q.x - t * q.y, v = t * q.x + q.y;
    const double ux = u - p.c * std::sqrt(s);
    const Vec2 du{1.0, -t}, dv{t, 1.0};
    const double ia = 1.0 / (p.a * p.a), ib = 1.0 / (p.b * p.b);
    const double ial = 1.0 / (p.alpha * p.alpha), ibe = 1.0 / (p.beta * p.beta);
    return {{
        {s - (ux * ux * ia + v * v * ib), -(du * (2.0 * ux * ia) + dv * (2.0 * v * ib)), ArcKind::EllipticArc, ArcRole::Ellipse},
        {ux * ux * ial - v * v * ibe - s, du * (2.0 * ux * ial) - dv * (2.0 * v * ibe), ArcKind::HyperbolicArc, ArcRole::Hyperbola},
        {p.k1 * u - v, du * p.k1 - dv, ArcKind::FlatSegment, ArcRole::EdgeK1},
        {v - p.k2 * u, dv - du * p.k2, ArcKind::FlatSegment, ArcRole::EdgeK2},
    }};
}

struct SectionPoint {
    Vec2 q;
    Vec3 d_xi;   // gradient of xi(p)
    Vec3 d_eta;  // gradient of eta(p)
};

inline SectionPoint to_section(BodyKind kind, Vec3 p) {
    if (kind == BodyKind::G1) {
        const double rho = std::hypot(p.y, p.z);
        const Vec3 dr = rho > 0.0 ? Vec3{0.0, p.y / rho, p.z / rho} : Vec3{0.0, 1.0, 0.0};
        return {{p.x, rho}, {1.0, 0.0, 0.0}, dr};
    }
    const double r = std::hypot(p.x, p.y);
    const Vec3 dr = r > 0.0 ? Vec3{p.x / r, p.y / r, 0.0} : Vec3{1.0, 0.0, 0.0};
    return {{r, std::abs(p.z)}, dr, {0.0, 0.0, p.z < 0.0 ? -1.0 : 1.0}};
}

inline bool inside(const ConstructionParams& prm, BodyKind kind, Vec3 p) {
    const SectionPoint sp = to_section(kind, p);
    for (const Constraint& c : constraints(prm, sp.q))
        if (!(c.value < 0.0)) return false;
    return true;
}

inline double bounding_radius(const Body2D& section) {
    double r = 0.0;
    for (const BoundaryArc& arc : section.arcs)
        for (int i = 0; i <= 64; ++i) r = std::max(r, norm(arc.point_at(i / 64.0)));
    return 1.05 * r;
}

}  // namespace oracle_detail

inline Trajectory3 trace3d_oracle(const Body3D& body, Vec3 direction, int max_bounces = kDefaultMaxBounces,
                                  const Tolerances& tol = {}, double step = 1e-3) {
    using namespace oracle_detail;
    if (!(norm(direction) > 0.0)) throw std::invalid_argument("trace3d_oracle: zero direction");
    if (!is_unit(direction, 1e-9)) throw std::invalid_argument("trace3d_oracle: direction must be a unit vector");
    if (max_bounces < 1) throw std::invalid_argument("trace3d_oracle: max_bounces must be at least 1");
    const ConstructionParams& prm = body.section.params;
    const double c = prm.c;
    const double h = step * c;
    const double radius = bounding_radius(body.section);

    Trajectory3 traj;
    traj.initial = {{0, 0, 0}, direction};
    traj.max_bounces = max_bounces;
    Vec3 pos{0, 0, 0}, dir = direction;

    for (;;) {
        // march until the membership flips from outside to inside, or the ray leaves the ball
        double t_out = 0.0, t_in = -1.0;
        for (double t = h; ; t += h) {
            const Vec3 p = pos + dir * t;
            if (inside(prm, body.kind, p)) {
                t_in = t;
                break;
            }
            t_out = t;
            if (norm(p) > radius && dot(p, dir) > 0.0) break;
        }
        if (t_in < 0.0) break;
        while (t_in - t_out > tol.tie_eps * c) {
            const double mid = 0.5 * (t_out + t_in);
            if (mid == t_out || mid == t_in) break;
            (inside(prm, body.kind, pos + dir * mid) ? t_in : t_out) = mid;
        }
        if (static_cast<int>(traj.hits.size()) >= max_bounces) {
            traj.status = TraceStatus::MaxBounces;
            break;
        }
        const Vec3 hit = pos + dir * t_out;
        const SectionPoint sp = to_section(body.kind, hit);
        // active piece: the constraint closest to zero in distance units
        const auto cons = constraints(prm, sp.q);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cons.size(); ++i) {
            const double dist = std::abs(cons[i].value) / norm(cons[i].grad);
            if (dist < best_dist) {
                best_dist = dist;
                best = i;
            }
        }
        const Vec2 g = cons[best].grad;
        Vec3 n = normalized(sp.d_xi * g.x + sp.d_eta * g.y);
        if (dot(n, dir) > 0.0) n = -n;

        HitRecord<Vec3> rec;
        rec.arc_index = best;
        rec.kind = cons[best].kind;
        rec.role = cons[best].role;
        rec.point = hit;
        rec.normal = n;
        rec.t = t_out;
        traj.hits.push_back(rec);

        pos = hit;
        dir = normalized(reflect_direction(dir, n));
    }
    traj.exit = {pos, dir};
    return traj;
}

}  // namespace invis
