#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "invis/geom2d.hpp"

namespace invis {

enum class Violation { InvalidScale, InvalidEccentricity, InvalidInclinations, NearDegenerate, InternalInconsistency };

/// Inclinations closer than this to k_min, k_max or each other are rejected as numerically degenerate.
inline constexpr double kInclinationMargin = 1e-9;

class ConstructionError : public std::invalid_argument {
public:
    ConstructionError(Violation v, const std::string& what) : std::invalid_argument(what), violation_(v) {}
    Violation violation() const noexcept { return violation_; }

private:
    Violation violation_;
};

/// Every scalar of one body instance. Built by derive_params; the only inputs are c, kappa, k1, k2.
struct ConstructionParams {
    double c{};      // half focal distance
    double kappa{};  // a/c = c/alpha
    double a{}, b{};          // ellipse semi-axes
    double alpha{}, beta{};   // hyperbola semi-axes
    double k1{}, k2{};        // inclinations of the two generating rays from F1
    double k_min{}, k_max{};
    double t{};      // tan(gamma)
    double gamma{};  // half of arctan(k1)

    Point2 focus1() const { return {-c, 0.0}; }
    Point2 focus2() const { return {c, 0.0}; }
};

struct KBounds {
    double k_min{};
    double k_max{};
};

namespace detail {
inline void require_eccentricity(double kappa) {
    if (!(kappa > 1.0 && kappa < 2.0))
        throw ConstructionError(Violation::InvalidEccentricity,
                                "eccentricity parameter kappa=" + std::to_string(kappa) + " violates 1 < kappa < 2");
}
}  // namespace detail

inline KBounds k_bounds(double kappa) {
    detail::require_eccentricity(kappa);
    const double m = kappa - 1.0;
    return {m * std::sqrt(4.0 - m * m) / (2.0 - m * m), std::sqrt(kappa * kappa - 1.0)};
}

/// The other printed closed form of k_min; algebraically identical to k_bounds(kappa).k_min.
inline double k_min_focal_form(double kappa) {
    detail::require_eccentricity(kappa);
    const double u = 2.0 - kappa;
    return std::sqrt(kappa * kappa - 1.0) * std::sqrt(1.0 - u * u) / (1.0 + 2.0 * kappa - kappa * kappa);
}

inline ConstructionParams derive_params(double c, double kappa, double k1, double k2) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw ConstructionError(Violation::InvalidScale, "scale c=" + std::to_string(c) + " must be positive and finite");
    const auto [k_min, k_max] = k_bounds(kappa);
    if (!(k_min < k1 && k1 < k2 && k2 < k_max))
        throw ConstructionError(Violation::InvalidInclinations,
                                "inclinations k1=" + std::to_string(k1) + ", k2=" + std::to_string(k2) +
                                    " violate k_min < k1 < k2 < k_max with k_min=" + std::to_string(k_min) +
                                    ", k_max=" + std::to_string(k_max));
    if (k1 - k_min < kInclinationMargin || k2 - k1 < kInclinationMargin || k_max - k2 < kInclinationMargin)
        throw ConstructionError(Violation::NearDegenerate,
                                "inclinations k1=" + std::to_string(k1) + ", k2=" + std::to_string(k2) +
                                    " are within 1e-9 of k_min, k_max or each other");
    ConstructionParams p;
    p.c = c;
    p.kappa = kappa;
    p.a = kappa * c;
    p.b = c * std::sqrt(kappa * kappa - 1.0);
    p.alpha = c / kappa;
    p.beta = c * std::sqrt(1.0 - 1.0 / (kappa * kappa));
    p.k1 = k1;
    p.k2 = k2;
    p.k_min = k_min;
    p.k_max = k_max;
    // (sqrt(k^2+1) - 1)/k, rewritten without cancellation
    p.t = k1 / (std::sqrt(k1 * k1 + 1.0) + 1.0);
    p.gamma = std::atan(p.t);
    return p;
}

inline double focal_distance_ellipse(const ConstructionParams& p, double x_a) {
    if (!(std::abs(x_a) <= p.a * (1.0 + 1e-12))) throw std::invalid_argument("focal_distance_ellipse: abscissa outside the ellipse");
    return p.c / p.a * x_a + p.a;
}

inline double focal_distance_hyperbola(const ConstructionParams& p, double x_b) {
    if (!(x_b >= p.alpha * (1.0 - 1e-12))) throw std::invalid_argument("focal_distance_hyperbola: abscissa left of the branch vertex");
    return p.c / p.alpha * x_b + p.alpha;
}

/// Upper intersection of the ellipse with the right hyperbola branch.
inline Point2 intersection_point_C(const ConstructionParams& p) { return {p.c, p.b * p.b / p.a}; }

/// Points where the ray from F1 with slope k meets the ellipse (A) and the right branch (B).
struct FocalChord {
    Point2 a_point;
    std::optional<Point2> b_point;
};

inline Ray2 focal_ray(const ConstructionParams& p, double k) {
    return {p.focus1(), normalized({1.0, k})};
}

inline FocalChord focal_chord(const ConstructionParams& p, double k) {
    const Ray2 r = focal_ray(p, k);
    const auto ha = intersect_ray_ellipse(r, p.a, p.b);
    if (!ha) throw std::logic_error("focal_chord: focus must lie inside the ellipse");
    FocalChord out{ha->point, std::nullopt};
    if (const auto hb = intersect_ray_hyperbola_right(r, p.alpha, p.beta)) out.b_point = hb->point;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Boundary pieces

enum class ArcKind { EllipticArc, HyperbolicArc, FlatSegment };

enum class ArcRole { Ellipse, Hyperbola, EdgeK1, EdgeK2 };

inline const char* to_string(ArcKind k) {
    switch (k) {
        case ArcKind::EllipticArc: return "elliptic";
        case ArcKind::HyperbolicArc: return "hyperbolic";
        case ArcKind::FlatSegment: return "flat";
    }
    return "?";
}

inline const char* to_string(ArcRole r) {
    switch (r) {
        case ArcRole::Ellipse: return "ellipse";
        case ArcRole::Hyperbola: return "hyperbola";
        case ArcRole::EdgeK1: return "edge_k1";
        case ArcRole::EdgeK2: return "edge_k2";
    }
    return "?";
}

/// Hits on a conic arc within this relative inclination of either end count as corner hits.
inline constexpr double kArcEndMargin = 1e-12;

/// One mirror piece. Conic data and segment endpoints live in the canonical frame;
/// `frame` places the piece in body coordinates.
struct BoundaryArc {
    ArcKind kind = ArcKind::FlatSegment;
    ArcRole role = ArcRole::EdgeK1;
    double semi_x = 0.0;  // a or alpha
    double semi_y = 0.0;  // b or beta
    double focus_c = 0.0; // canonical F1 = (-focus_c, 0); apex of the inclination cone
    double k_lo = 0.0, k_hi = 0.0;
    Point2 p0, p1;        // flat segments only
    FrameMap frame;
    bool mirrored_copy = false;

    bool accepts(Point2 q) const {
        if (!(q.y > 0.0)) return false;
        const double run = q.x + focus_c;
        return run > 0.0 && k_lo * run <= q.y && q.y <= k_hi * run;
    }

    /// Nearest admissible crossing at t > min_t; ray and result in body coordinates.
    std::optional<Hit> intersect(const Ray2& body_ray, double min_t) const {
        const Ray2 r{frame.inverse(body_ray.origin), frame.inverse_vector(body_ray.direction)};
        std::optional<Hit> hit;
        if (kind == ArcKind::FlatSegment) {
            hit = intersect_ray_segment(r, p0, p1, min_t);
        } else {
            const HitPair hits = kind == ArcKind::EllipticArc ? ray_ellipse_hits(r, semi_x, semi_y, min_t)
                                                              : ray_hyperbola_right_hits(r, semi_x, semi_y, min_t);
            for (const Hit& h : hits) {
                if (accepts(h.point)) {
                    hit = h;
                    // landing on an arc end is a corner hit
                    const double run = h.point.x + focus_c;
                    const double band = kArcEndMargin * run * (1.0 + k_hi);
                    if (h.point.y - k_lo * run <= band || k_hi * run - h.point.y <= band) hit->grazing = true;
                    break;
                }
            }
        }
        if (!hit) return std::nullopt;
        hit->point = frame.forward(hit->point);
        hit->normal = frame.forward_vector(hit->normal);
        return hit;
    }

    /// Point at parameter s in [0,1], canonical frame. Conic arcs are swept by polar angle about F1
    /// from inclination k_lo to k_hi; segments run p0 -> p1.
    Point2 canonical_point_at(double s) const {
        if (kind == ArcKind::FlatSegment) return p0 + (p1 - p0) * s;
        const double th0 = std::atan(k_lo), th1 = std::atan(k_hi);
        // endpoints reuse the exact generating directions so adjacent pieces meet bit-for-bit
        const Vec2 dir = s <= 0.0 ? normalized({1.0, k_lo}) : s >= 1.0 ? normalized({1.0, k_hi}) : polar_unit(th0 + (th1 - th0) * s);
        const Ray2 r{{-focus_c, 0.0}, dir};
        const auto h = kind == ArcKind::EllipticArc ? intersect_ray_ellipse(r, semi_x, semi_y)
                                                    : intersect_ray_hyperbola_right(r, semi_x, semi_y);
        if (!h) throw std::logic_error("arc parameterization left the conic");
        return h->point;
    }

    Point2 point_at(double s) const { return frame.forward(canonical_point_at(s)); }

    /// Implicit function of the carrying curve (canonical frame): zero on the curve.
    double canonical_residual(Point2 q) const {
        switch (kind) {
            case ArcKind::EllipticArc: return q.x * q.x / (semi_x * semi_x) + q.y * q.y / (semi_y * semi_y) - 1.0;
            case ArcKind::HyperbolicArc: return q.x * q.x / (semi_x * semi_x) - q.y * q.y / (semi_y * semi_y) - 1.0;
            case ArcKind::FlatSegment: return cross(p1 - p0, q - p0) / norm(p1 - p0);
        }
        return 0.0;
    }
};

/// Like build_region but skips the focal-distance check; used for deliberately broken bodies.
inline std::array<BoundaryArc, 4> build_region_unchecked(const ConstructionParams& p) {
    const FocalChord ch1 = focal_chord(p, p.k1);
    const FocalChord ch2 = focal_chord(p, p.k2);
    if (!ch1.b_point || !ch2.b_point)
        throw ConstructionError(Violation::InternalInconsistency, "generating ray misses the hyperbola branch");

    BoundaryArc ellipse;
    ellipse.kind = ArcKind::EllipticArc;
    ellipse.role = ArcRole::Ellipse;
    ellipse.semi_x = p.a;
    ellipse.semi_y = p.b;

    BoundaryArc hyperbola;
    hyperbola.kind = ArcKind::HyperbolicArc;
    hyperbola.role = ArcRole::Hyperbola;
    hyperbola.semi_x = p.alpha;
    hyperbola.semi_y = p.beta;

    BoundaryArc edge2;
    edge2.role = ArcRole::EdgeK2;
    edge2.p0 = ch2.a_point;
    edge2.p1 = *ch2.b_point;

    BoundaryArc edge1;
    edge1.role = ArcRole::EdgeK1;
    edge1.p0 = ch1.a_point;
    edge1.p1 = *ch1.b_point;

    std::array<BoundaryArc, 4> arcs{ellipse, edge2, hyperbola, edge1};
    for (auto& arc : arcs) {
        arc.focus_c = p.c;
        arc.k_lo = p.k1;
        arc.k_hi = p.k2;
    }
    arcs[1].k_lo = arcs[1].k_hi = p.k2;
    arcs[3].k_lo = arcs[3].k_hi = p.k1;
    return arcs;
}

/// The four pieces of F in the canonical frame, in boundary-loop order
/// ellipse (A1->A2), edge k2 (A2->B2), hyperbola (B1->B2), edge k1 (A1->B1).
inline std::array<BoundaryArc, 4> build_region(const ConstructionParams& p) {
    auto arcs = build_region_unchecked(p);
    const Point2 f1 = p.focus1();
    for (const BoundaryArc& edge : {arcs[1], arcs[3]}) {
        if (!(distance(f1, edge.p0) < 2.0 * p.c && 2.0 * p.c < distance(f1, edge.p1)))
            throw ConstructionError(Violation::InternalInconsistency, "focal distances violate |F1A| < 2c < |F1B|");
    }
    return arcs;
}

inline bool region_contains_xy(const ConstructionParams& p, Point2 q) {
    const double run = q.x + p.c;
    return q.x * q.x / (p.a * p.a) + q.y * q.y / (p.b * p.b) > 1.0 &&
           q.x * q.x / (p.alpha * p.alpha) - q.y * q.y / (p.beta * p.beta) < 1.0 &&
           q.y > 0.0 && run > 0.0 && p.k1 * run < q.y && q.y < p.k2 * run;
}

/// Membership of F written directly in the rotated coordinates, with
/// u = xi - t eta = sqrt(1+t^2)(x+c) and v = t xi + eta = sqrt(1+t^2) y.
inline bool region_contains_xieta(const ConstructionParams& p, Point2 q) {
    const double t = p.t;
    const double s = 1.0 + t * t;
    const double u = q.x - t * q.y;
    const double v = t * q.x + q.y;
    const double ux = u - p.c * std::sqrt(s);  // sqrt(1+t^2) x
    return ux * ux / (p.alpha * p.alpha) - v * v / (p.beta * p.beta) < s &&
           s < ux * ux / (p.a * p.a) + v * v / (p.b * p.b) &&
           v > 0.0 && u > 0.0 && p.k1 * u < v && v < p.k2 * u;
}

/// The planar body F and its mirror image about eta = 0, in body coordinates with O = F1 at the origin.
struct Body2D {
    std::vector<BoundaryArc> arcs;  // [0,4): F, [4,8): mirror copy
    ConstructionParams params;

    bool contains(Point2 q) const {
        return region_contains_xieta(params, q) || region_contains_xieta(params, {q.x, -q.y});
    }
    double scale() const { return params.c; }
};

inline Body2D assemble_body2d(const ConstructionParams& p, const std::array<BoundaryArc, 4>& region) {
    const FrameMap place = FrameMap::canonical(p.c, p.gamma);
    Body2D body;
    body.params = p;
    body.arcs.reserve(8);
    for (BoundaryArc arc : region) {
        arc.frame = place;
        body.arcs.push_back(arc);
    }
    for (BoundaryArc arc : region) {
        arc.frame = place.then_mirror();
        arc.mirrored_copy = true;
        body.arcs.push_back(arc);
    }
    return body;
}

inline Body2D build_body2d(const ConstructionParams& p) { return assemble_body2d(p, build_region(p)); }

// ---------------------------------------------------------------------------------------------
// Solids of revolution

struct Vec3 {
    double x{}, y{}, z{};

    constexpr Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, Vec3 v) { return v * s; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }
inline Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    return v / n;
}
inline bool is_unit(Vec3 v, double tol = kUnitTolerance) { return std::abs(norm(v) - 1.0) <= tol; }
inline Vec3 reflect_direction(Vec3 d, Vec3 n) {
    if (!is_unit(d, 1e-9) || !is_unit(n, 1e-9)) throw std::invalid_argument("reflect_direction: inputs must be unit vectors");
    return d - n * (2.0 * dot(d, n));
}

/// G1 revolves the section about the xi axis (mesh/world +X); G2 about the eta axis (world +Z).
enum class BodyKind { G1, G2 };

inline const char* to_string(BodyKind k) { return k == BodyKind::G1 ? "g1" : "g2"; }

struct Body3D {
    BodyKind kind = BodyKind::G1;
    Body2D section;
    /// Signed meridian section in (xi, eta) = (axial, radial) for G1 or (radial, axial) for G2.
    std::vector<BoundaryArc> meridian;

    double scale() const { return section.params.c; }
    Vec3 axis() const { return kind == BodyKind::G1 ? Vec3{1, 0, 0} : Vec3{0, 0, 1}; }
};

inline Body3D make_body3d(BodyKind kind, Body2D section) {
    Body3D body{kind, std::move(section), {}};
    body.meridian = body.section.arcs;
    if (kind == BodyKind::G2) {
        // radial coordinate is signed in the meridian plane: add the copies mirrored about xi = 0
        for (const BoundaryArc& arc : body.section.arcs) {
            BoundaryArc m = arc;
            m.frame = arc.frame.then_rotate(std::numbers::pi).then_mirror();
            body.meridian.push_back(m);
        }
    }
    return body;
}


/// Point of the meridian section that p rotates onto.
inline Point2 section_point(const Body3D& body, Vec3 p) {
    return body.kind == BodyKind::G1 ? Point2{p.x, std::hypot(p.y, p.z)} : Point2{std::hypot(p.x, p.y), std::abs(p.z)};
}

inline bool body3d_contains(const Body3D& body, Vec3 p) { return region_contains_xieta(body.section.params, section_point(body, p)); }

enum class Membership { Inside, Outside, Boundary };

/// Distance from q to one piece (body coordinates). Conic arcs: coarse sweep, then a ternary
/// search around the best sample.
inline double distance_to_arc(const BoundaryArc& arc, Point2 q) {
    if (arc.kind == ArcKind::FlatSegment) {
        const Point2 a = arc.point_at(0.0), b = arc.point_at(1.0);
        const Vec2 e = b - a;
        const double s = std::clamp(dot(q - a, e) / dot(e, e), 0.0, 1.0);
        return distance(a + e * s, q);
    }
    constexpr int kSweep = 64;
    auto d = [&](double s) { return distance(arc.point_at(s), q); };
    int best = 0;
    double best_d = d(0.0);
    for (int i = 1; i <= kSweep; ++i) {
        const double di = d(static_cast<double>(i) / kSweep);
        if (di < best_d) best_d = di, best = i;
    }
    double lo = std::max(0, best - 1) / static_cast<double>(kSweep), hi = std::min(kSweep, best + 1) / static_cast<double>(kSweep);
    for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (d(m1) < d(m2))
            hi = m2;
        else
            lo = m1;
    }
    return std::min(best_d, d(0.5 * (lo + hi)));
}

inline double distance_to_boundary(const Body2D& body, Point2 q) {
    double best = std::numeric_limits<double>::infinity();
    for (const BoundaryArc& arc : body.arcs) best = std::min(best, distance_to_arc(arc, q));
    return best;
}

/// Tri-state membership: Boundary when p lies within `band` of the surface.
inline Membership classify_point(const Body3D& body, Vec3 p, double band) {
    const Point2 q = section_point(body, p);
    if (distance_to_boundary(body.section, q) <= band) return Membership::Boundary;
    return region_contains_xieta(body.section.params, q) ? Membership::Inside : Membership::Outside;
}

}  // namespace invis
