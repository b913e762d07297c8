#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace invis {

struct Vec2 {
    double x{};
    double y{};

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

using Point2 = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    return v / n;
}

inline Vec2 rotated(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 polar_unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline constexpr double kUnitTolerance = 1e-12;

inline bool is_unit(Vec2 v, double tol = kUnitTolerance) { return std::abs(norm(v) - 1.0) <= tol; }

struct Ray2 {
    Point2 origin;
    Vec2 direction;  // unit

    Point2 at(double t) const { return origin + direction * t; }
};

struct Hit {
    double t{};
    Point2 point;
    Vec2 normal;  // unit, facing the incoming ray (dot(normal, direction) <= 0)
    bool grazing = false;
};

/// Specular reflection d' = d - 2 (d.n) n.
inline Vec2 reflect_direction(Vec2 d, Vec2 n) {
    if (!is_unit(d, 1e-9) || !is_unit(n, 1e-9)) throw std::invalid_argument("reflect_direction: inputs must be unit vectors");
    return d - n * (2.0 * dot(d, n));
}

namespace detail {

// Relative discriminant below this marks a tangential (grazing) contact.
inline constexpr double kGrazingDiscriminant = 1e-14;

struct QuadraticRoots {
    std::array<double, 2> t{};
    int count = 0;
    bool tangential = false;
};

// Real roots of A t^2 + B t + C = 0, ascending, with one Newton polish step.
inline QuadraticRoots solve_quadratic(double A, double B, double C) {
    QuadraticRoots r;
    const double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
    if (scale == 0.0) return r;
    if (std::abs(A) <= 1e-15 * scale) {
        if (B == 0.0) return r;
        r.t[0] = -C / B;
        r.count = 1;
        return r;
    }
    const double disc = B * B - 4.0 * A * C;
    const double disc_scale = B * B + 4.0 * std::abs(A * C);
    const double rel = disc / disc_scale;
    if (rel < -kGrazingDiscriminant) return r;
    if (std::abs(rel) < kGrazingDiscriminant) {
        r.t[0] = -B / (2.0 * A);
        r.count = 1;
        r.tangential = true;
        return r;
    }
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    double t0 = q / A;
    double t1 = q != 0.0 ? C / q : t0;
    auto polish = [&](double t) {
        const double d = 2.0 * A * t + B;
        if (d == 0.0) return t;
        return t - (A * t * t + B * t + C) / d;
    };
    t0 = polish(t0);
    t1 = polish(t1);
    if (t0 > t1) std::swap(t0, t1);
    r.t = {t0, t1};
    r.count = 2;
    return r;
}

inline Vec2 facing(Vec2 n, Vec2 d) { return dot(n, d) > 0.0 ? -n : n; }

}  // namespace detail

/// All crossings of the ray with the ellipse x^2/a^2 + y^2/b^2 = 1 at t > min_t, ascending.
struct HitPair {
    std::array<Hit, 2> hits{};
    int count = 0;

    const Hit* begin() const { return hits.data(); }
    const Hit* end() const { return hits.data() + count; }
};

inline HitPair ray_ellipse_hits(const Ray2& r, double a, double b, double min_t = 0.0) {
    const double ia2 = 1.0 / (a * a), ib2 = 1.0 / (b * b);
    const Vec2 o = r.origin, d = r.direction;
    const auto roots = detail::solve_quadratic(d.x * d.x * ia2 + d.y * d.y * ib2,
                                               2.0 * (o.x * d.x * ia2 + o.y * d.y * ib2),
                                               o.x * o.x * ia2 + o.y * o.y * ib2 - 1.0);
    HitPair out;
    for (int i = 0; i < roots.count; ++i) {
        const double t = roots.t[i];
        if (!(t > min_t)) continue;
        const Point2 p = r.at(t);
        const Vec2 n = detail::facing(normalized({p.x * ia2, p.y * ib2}), d);
        out.hits[out.count++] = Hit{t, p, n, roots.tangential};
    }
    return out;
}

/// Crossings with the right branch (x > 0) of x^2/alpha^2 - y^2/beta^2 = 1.
inline HitPair ray_hyperbola_right_hits(const Ray2& r, double alpha, double beta, double min_t = 0.0) {
    const double ia2 = 1.0 / (alpha * alpha), ib2 = 1.0 / (beta * beta);
    const Vec2 o = r.origin, d = r.direction;
    const auto roots = detail::solve_quadratic(d.x * d.x * ia2 - d.y * d.y * ib2,
                                               2.0 * (o.x * d.x * ia2 - o.y * d.y * ib2),
                                               o.x * o.x * ia2 - o.y * o.y * ib2 - 1.0);
    HitPair out;
    for (int i = 0; i < roots.count; ++i) {
        const double t = roots.t[i];
        if (!(t > min_t)) continue;
        const Point2 p = r.at(t);
        if (p.x <= 0.0) continue;
        const Vec2 n = detail::facing(normalized({p.x * ia2, -p.y * ib2}), d);
        out.hits[out.count++] = Hit{t, p, n, roots.tangential};
    }
    return out;
}

inline std::optional<Hit> intersect_ray_ellipse(const Ray2& r, double a, double b, double min_t = 0.0) {
    const auto hits = ray_ellipse_hits(r, a, b, min_t);
    if (hits.count == 0) return std::nullopt;
    return hits.hits[0];
}

inline std::optional<Hit> intersect_ray_hyperbola_right(const Ray2& r, double alpha, double beta, double min_t = 0.0) {
    const auto hits = ray_hyperbola_right_hits(r, alpha, beta, min_t);
    if (hits.count == 0) return std::nullopt;
    return hits.hits[0];
}

// Barycentric margin at segment endpoints inside which hits are flagged grazing.
inline constexpr double kSegmentEndpointMargin = 1e-12;

inline std::optional<Hit> intersect_ray_segment(const Ray2& r, Point2 p0, Point2 p1, double min_t = 0.0) {
    const Vec2 e = p1 - p0;
    const double len = norm(e);
    if (!(len > 0.0)) throw std::invalid_argument("intersect_ray_segment: degenerate segment");
    const double denom = cross(r.direction, e);
    if (std::abs(denom) <= 1e-15 * len) return std::nullopt;
    const Vec2 w = p0 - r.origin;
    const double t = cross(w, e) / denom;
    const double s = cross(w, r.direction) / denom;
    if (!(t > min_t)) return std::nullopt;
    if (s < -kSegmentEndpointMargin || s > 1.0 + kSegmentEndpointMargin) return std::nullopt;
    const bool at_end = s <= kSegmentEndpointMargin || s >= 1.0 - kSegmentEndpointMargin;
    const Vec2 n = detail::facing(Vec2{-e.y, e.x} / len, r.direction);
    return Hit{t, p0 + e * s, n, at_end};
}

/// Rigid map from the canonical conic frame (foci at (-c,0), (c,0)) into body coordinates:
///   forward(p) = M^mirror R(-gamma) (p + shift),  M = reflection about the first axis.
/// With shift = (c,0) this is xi = cos(g)(x+c) + sin(g) y, eta = -sin(g)(x+c) + cos(g) y.
struct FrameMap {
    double gamma = 0.0;
    Vec2 shift{};
    bool mirror = false;

    static FrameMap identity() { return {}; }
    static FrameMap canonical(double c, double gamma) { return {gamma, {c, 0.0}, false}; }

    Vec2 forward_vector(Vec2 v) const {
        const Vec2 q = rotated(v, -gamma);
        return mirror ? Vec2{q.x, -q.y} : q;
    }
    Vec2 inverse_vector(Vec2 v) const {
        const Vec2 q = mirror ? Vec2{v.x, -v.y} : v;
        return rotated(q, gamma);
    }
    Point2 forward(Point2 p) const { return forward_vector(p + shift); }
    Point2 inverse(Point2 q) const { return inverse_vector(q) - shift; }

    /// This map followed by reflection about the first body axis.
    FrameMap then_mirror() const { return {gamma, shift, !mirror}; }
    /// This map followed by a counter-clockwise rotation by delta about the body origin.
    FrameMap then_rotate(double delta) const { return {mirror ? gamma + delta : gamma - delta, shift, mirror}; }
};

inline Point2 frame_forward(const FrameMap& f, Point2 p) { return f.forward(p); }
inline Point2 frame_inverse(const FrameMap& f, Point2 q) { return f.inverse(q); }

}  // namespace invis
