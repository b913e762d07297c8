#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "invis/billiard.hpp"
#include "invis/construction.hpp"

namespace invis {

enum class RayClass { Miss, Invisible, Deviated, Stuck, Grazing };

inline const char* to_string(RayClass c) {
    switch (c) {
        case RayClass::Miss: return "miss";
        case RayClass::Invisible: return "invisible";
        case RayClass::Deviated: return "deviated";
        case RayClass::Stuck: return "stuck";
        case RayClass::Grazing: return "grazing";
    }
    return "?";
}

/// Angle between two unit vectors, accurate near zero.
template <class V>
double angle_between(const V& a, const V& b) {
    return 2.0 * std::atan2(norm(a - b), norm(a + b));
}

/// Perpendicular distance from the origin O to the line through `origin` along unit `direction`.
template <class V>
double line_offset_from_origin(const V& origin, const V& direction) {
    return norm(origin - direction * dot(origin, direction));
}

template <class V>
RayClass classify_ray(const Trajectory<V>& traj, const Tolerances& tol, double scale) {
    if (traj.hits.empty()) return RayClass::Miss;
    if (traj.status == TraceStatus::MaxBounces) return RayClass::Stuck;
    if (traj.grazing()) return RayClass::Grazing;
    const double dev = angle_between(traj.exit.direction, traj.initial.direction);
    const double off = line_offset_from_origin(traj.exit.origin, traj.exit.direction);
    if (dev <= tol.angle && off <= tol.offset * scale) return RayClass::Invisible;
    return RayClass::Deviated;
}

/// Reflected path length from O to the last hit minus the straight distance O -> last hit.
template <class V>
double optical_delay(const Trajectory<V>& traj) {
    double path = 0.0;
    V prev = traj.initial.origin;
    for (const auto& h : traj.hits) {
        path += norm(h.point - prev);
        prev = h.point;
    }
    return path - norm(prev - traj.initial.origin);
}

// ---------------------------------------------------------------------------------------------
// Direction sampling

enum class SamplingMode { GridAngles, UniformSphere, Stratified };

inline const char* to_string(SamplingMode m) {
    switch (m) {
        case SamplingMode::GridAngles: return "grid";
        case SamplingMode::UniformSphere: return "sphere";
        case SamplingMode::Stratified: return "stratified";
    }
    return "?";
}

struct Sampling {
    SamplingMode mode = SamplingMode::GridAngles;
    std::optional<std::uint64_t> seed;  // pseudo-random draws when set; low-discrepancy otherwise
};

namespace detail {

// splitmix64: portable, so seeded reports match across standard libraries
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double unit_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
    const std::uint64_t h = splitmix64(splitmix64(seed ^ (stream * 0xd1b54a32d192ed03ULL)) + index);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline constexpr double kInvGolden = 0.6180339887498948482;

inline double fract(double x) { return x - std::floor(x); }

}  // namespace detail

inline std::vector<Vec2> sample_circle(const Sampling& s, std::size_t n) {
    std::vector<Vec2> out(n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        double u = 0.0;
        switch (s.mode) {
            case SamplingMode::GridAngles: u = static_cast<double>(i) / static_cast<double>(n); break;
            case SamplingMode::UniformSphere:
                u = s.seed ? detail::unit_uniform(*s.seed, i, 0) : detail::fract(0.5 + i * detail::kInvGolden);
                break;
            case SamplingMode::Stratified:
                u = (static_cast<double>(i) + detail::unit_uniform(s.seed.value_or(0), i, 0)) / static_cast<double>(n);
                break;
        }
        out[i] = polar_unit(two_pi * u);
    }
    return out;
}

inline std::vector<Vec3> sample_sphere(const Sampling& s, std::size_t n) {
    std::vector<Vec3> out(n);
    const double two_pi = 2.0 * std::numbers::pi;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0, phi = 0.0;
        const bool random = s.mode == SamplingMode::UniformSphere && s.seed;
        if (random) {
            z = 1.0 - 2.0 * detail::unit_uniform(*s.seed, i, 0);
            phi = two_pi * detail::unit_uniform(*s.seed, i, 1);
        } else {
            // Fibonacci lattice; stratified jitters each point inside its z-band
            const double jitter = s.mode == SamplingMode::Stratified ? detail::unit_uniform(s.seed.value_or(0), i, 0) : 0.5;
            z = 1.0 - 2.0 * (static_cast<double>(i) + jitter) / nd;
            phi = two_pi * detail::fract(i * detail::kInvGolden);
        }
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        out[i] = normalized(Vec3{r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Report

struct ClassCounts {
    std::size_t miss = 0, invisible = 0, deviated = 0, stuck = 0, grazing = 0;

    std::size_t& operator[](RayClass c) {
        switch (c) {
            case RayClass::Miss: return miss;
            case RayClass::Invisible: return invisible;
            case RayClass::Deviated: return deviated;
            case RayClass::Stuck: return stuck;
            case RayClass::Grazing: return grazing;
        }
        return miss;
    }
    std::size_t total() const { return miss + invisible + deviated + stuck + grazing; }
    bool operator==(const ClassCounts&) const = default;
};

struct InvisibilityReport {
    double c = 0.0, kappa = 0.0, k1 = 0.0, k2 = 0.0;
    std::string body = "planar";
    std::string sampling = "grid";
    std::optional<std::uint64_t> seed;
    std::string perturbation = "none";
    std::size_t samples = 0;
    ClassCounts counts;
    std::map<int, std::size_t> bounce_histogram;
    std::size_t three_bounce = 0;
    std::size_t second_hit_not_flat = 0;
    double max_angle_deviation = 0.0;  // radians, over rays with at least one bounce (not grazing/stuck)
    double max_line_offset = 0.0;      // length
    double max_second_hit_error = 0.0; // | |second hit| - 2c | over 3-bounce rays
    double expected_delay = 0.0;       // 2 (a - alpha)
    double delay_min = 0.0, delay_max = 0.0;
    double wall_time_s = 0.0;
    std::vector<std::pair<std::string, std::string>> config;

    double delay_spread() const { return three_bounce ? delay_max - delay_min : 0.0; }
    bool passed() const { return counts.deviated == 0 && counts.stuck == 0; }
};

namespace detail {

struct RaySummary {
    RayClass cls = RayClass::Miss;
    int bounces = 0;
    double deviation = 0.0;
    double offset = 0.0;
    bool measured = false;
    bool three = false;
    bool second_flat = true;
    double second_error = 0.0;
    double delay = 0.0;
};

template <class V>
RaySummary summarize(const Trajectory<V>& traj, const Tolerances& tol, double scale) {
    RaySummary s;
    s.cls = classify_ray(traj, tol, scale);
    s.bounces = static_cast<int>(traj.hits.size());
    if (s.cls == RayClass::Invisible || s.cls == RayClass::Deviated) {
        s.measured = true;
        s.deviation = angle_between(traj.exit.direction, traj.initial.direction);
        s.offset = line_offset_from_origin(traj.exit.origin, traj.exit.direction);
        if (traj.hits.size() == 3) {
            s.three = true;
            s.second_flat = traj.hits[1].kind == ArcKind::FlatSegment;
            s.second_error = std::abs(norm(traj.hits[1].point - traj.initial.origin) - 2.0 * scale);
            s.delay = optical_delay(traj);
        }
    }
    return s;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline void fold(InvisibilityReport& rep, const std::vector<RaySummary>& rays) {
    bool first_delay = true;
    for (const RaySummary& s : rays) {
        ++rep.counts[s.cls];
        ++rep.bounce_histogram[s.bounces];
        if (!s.measured) continue;
        rep.max_angle_deviation = std::max(rep.max_angle_deviation, s.deviation);
        rep.max_line_offset = std::max(rep.max_line_offset, s.offset);
        if (!s.three) continue;
        ++rep.three_bounce;
        if (!s.second_flat) ++rep.second_hit_not_flat;
        rep.max_second_hit_error = std::max(rep.max_second_hit_error, s.second_error);
        if (first_delay) {
            rep.delay_min = rep.delay_max = s.delay;
            first_delay = false;
        } else {
            rep.delay_min = std::min(rep.delay_min, s.delay);
            rep.delay_max = std::max(rep.delay_max, s.delay);
        }
    }
}

inline InvisibilityReport report_header(const ConstructionParams& p, const Sampling& s, std::size_t n) {
    InvisibilityReport rep;
    rep.c = p.c;
    rep.kappa = p.kappa;
    rep.k1 = p.k1;
    rep.k2 = p.k2;
    rep.sampling = to_string(s.mode);
    rep.seed = s.seed;
    rep.samples = n;
    rep.expected_delay = 2.0 * (p.a - p.alpha);
    return rep;
}

}  // namespace detail

/// Traces n directions from O, classifies each and aggregates. The result does not depend on
/// the number of worker threads (0 = hardware concurrency).
inline InvisibilityReport verify_invisibility(const Body2D& body, const Sampling& sampling, std::size_t n,
                                              const Tolerances& tol = {}, unsigned threads = 0,
                                              int max_bounces = kDefaultMaxBounces) {
    if (n < 1) throw std::invalid_argument("verify_invisibility: need at least one sample");
    tol.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto dirs = sample_circle(sampling, n);
    std::vector<detail::RaySummary> rays(n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        const auto traj = trace_arcs(body.arcs, body.scale(), Ray2{{0.0, 0.0}, dirs[i]}, max_bounces, tol);
        rays[i] = detail::summarize(traj, tol, body.scale());
    });
    InvisibilityReport rep = detail::report_header(body.params, sampling, n);
    rep.body = "planar";
    detail::fold(rep, rays);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

inline InvisibilityReport verify_invisibility(const Body3D& body, const Sampling& sampling, std::size_t n,
                                              const Tolerances& tol = {}, unsigned threads = 0,
                                              int max_bounces = kDefaultMaxBounces) {
    if (n < 1) throw std::invalid_argument("verify_invisibility: need at least one sample");
    tol.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto dirs = sample_sphere(sampling, n);
    std::vector<detail::RaySummary> rays(n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        rays[i] = detail::summarize(trace3d(body, dirs[i], max_bounces, tol), tol, body.scale());
    });
    InvisibilityReport rep = detail::report_header(body.section.params, sampling, n);
    rep.body = to_string(body.kind);
    detail::fold(rep, rays);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Bisector property

/// Triangle with apex V and base PQ split by the cevian foot D:
/// a1 = |VP|, a2 = |VQ|, b1 = |PD|, b2 = |DQ|, f = |VD|.
struct BisectorResiduals {
    double ratio;     // a1/a2 - b1/b2
    double product;   // a1 a2 - b1 b2 - f^2
    double identity;  // (a1 + b1)(a2 - b2) - f^2
};

namespace detail {
inline void require_triangle(double a1, double a2, double b1, double b2, double f) {
    for (double v : {a1, a2, b1, b2, f})
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("bisector check: lengths must be positive");
    const double base = b1 + b2;
    const double s = 0.5 * (a1 + a2 + base);
    const double area2 = s * (s - a1) * (s - a2) * (s - base);
    const double longest = std::max({a1, a2, base});
    // height over the longest side, relative to that side
    const double rel_height = area2 > 0.0 ? 2.0 * std::sqrt(area2) / (longest * longest) : 0.0;
    if (rel_height <= 1e-12) throw std::invalid_argument("bisector check: degenerate (collinear) triangle");
}
}  // namespace detail

inline BisectorResiduals bisector_relations(double a1, double a2, double b1, double b2, double f) {
    detail::require_triangle(a1, a2, b1, b2, f);
    return {a1 / a2 - b1 / b2, a1 * a2 - b1 * b2 - f * f, (a1 + b1) * (a2 - b2) - f * f};
}

inline double check_bisector_identity(double a1, double a2, double b1, double b2, double f) {
    return bisector_relations(a1, a2, b1, b2, f).identity;
}

/// Locates the foot D on PQ where (a1 + b1)(a2 - b2) = f^2 by bisection and returns
/// |angle PVD - angle DVQ|; zero iff the identity characterizes the bisector.
inline double converse_bisector_gap(Point2 apex, Point2 p, Point2 q) {
    const double a1 = distance(apex, p), a2 = distance(apex, q), base = distance(p, q);
    detail::require_triangle(a1, a2, 0.5 * base, 0.5 * base, distance(apex, (p + q) * 0.5));
    auto residual = [&](double s) {
        const Point2 d = p + (q - p) * s;
        const double f = distance(apex, d);
        return (a1 + s * base) * (a2 - (1.0 - s) * base) - f * f;
    };
    double lo = 0.0, hi = 1.0;
    double rlo = residual(lo);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double rm = residual(mid);
        if ((rm < 0.0) == (rlo < 0.0)) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
        }
    }
    const Point2 d = p + (q - p) * (0.5 * (lo + hi));
    return std::abs(angle_between(normalized(p - apex), normalized(d - apex)) -
                    angle_between(normalized(d - apex), normalized(q - apex)));
}

// ---------------------------------------------------------------------------------------------
// Equal angles at F2

struct FocalAngles {
    double angle_a;  // angle A F2 C
    double angle_b;  // angle B F2 C
    double difference() const { return std::abs(angle_a - angle_b); }
};

inline FocalAngles focal_angles(const ConstructionParams& p, double k) {
    if (!(k > p.k_min && k < p.k_max)) throw std::invalid_argument("check_angle_equality: k outside (k_min, k_max)");
    const FocalChord ch = focal_chord(p, k);
    if (!ch.b_point) throw std::invalid_argument("check_angle_equality: ray misses the hyperbola branch");
    const Point2 f2 = p.focus2(), cpt = intersection_point_C(p);
    const Vec2 to_c = normalized(cpt - f2);
    return {angle_between(normalized(ch.a_point - f2), to_c), angle_between(normalized(*ch.b_point - f2), to_c)};
}

inline double check_angle_equality(const ConstructionParams& p, double k) { return focal_angles(p, k).difference(); }

// ---------------------------------------------------------------------------------------------
// Connectivity

class InconclusiveProbe : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConnectivityResult {
    std::size_t components = 0;
    std::size_t interior_cells = 0;
    std::vector<std::size_t> component_sizes;  // descending
};

namespace detail {

struct Extent2 {
    double xi_min = std::numeric_limits<double>::infinity(), xi_max = -std::numeric_limits<double>::infinity();
    double eta_min = std::numeric_limits<double>::infinity(), eta_max = -std::numeric_limits<double>::infinity();
    std::vector<Point2> corners;
};

// Extent of F (the unmirrored half) in body coordinates.
inline Extent2 section_extent(const Body2D& body) {
    Extent2 e;
    for (const BoundaryArc& arc : body.arcs) {
        if (arc.mirrored_copy) continue;
        e.corners.push_back(arc.point_at(0.0));
        for (int i = 0; i <= 256; ++i) {
            const Point2 q = arc.point_at(i / 256.0);
            e.xi_min = std::min(e.xi_min, q.x);
            e.xi_max = std::max(e.xi_max, q.x);
            e.eta_min = std::min(e.eta_min, q.y);
            e.eta_max = std::max(e.eta_max, q.y);
        }
    }
    return e;
}

// Labels face-connected components of a dense occupancy grid.
inline ConnectivityResult label_components(const std::vector<std::uint8_t>& occ, std::array<std::size_t, 3> dims) {
    ConnectivityResult res;
    std::vector<std::uint8_t> seen(occ.size(), 0);
    const std::size_t nx = dims[0], ny = dims[1], nz = dims[2];
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < occ.size(); ++start) {
        if (!occ[start] || seen[start]) continue;
        std::size_t size = 0;
        seen[start] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t idx = queue.front();
            queue.pop_front();
            ++size;
            const std::size_t i = idx % nx, j = (idx / nx) % ny, k = idx / (nx * ny);
            auto visit = [&](std::size_t n) {
                if (occ[n] && !seen[n]) {
                    seen[n] = 1;
                    queue.push_back(n);
                }
            };
            if (i > 0) visit(idx - 1);
            if (i + 1 < nx) visit(idx + 1);
            if (j > 0) visit(idx - nx);
            if (j + 1 < ny) visit(idx + nx);
            if (k > 0) visit(idx - nx * ny);
            if (k + 1 < nz) visit(idx + nx * ny);
        }
        res.interior_cells += size;
        res.component_sizes.push_back(size);
    }
    res.components = res.component_sizes.size();
    std::sort(res.component_sizes.rbegin(), res.component_sizes.rend());
    return res;
}

inline void require_resolution(std::size_t resolution) {
    if (resolution < 32) throw std::invalid_argument("connectivity_probe: resolution must be at least 32");
}

struct Rect {
    double x0, x1, y0, y1;
    bool contains(Point2 q) const { return q.x >= x0 && q.x <= x1 && q.y >= y0 && q.y <= y1; }
};

// Exact test whether a closed axis-aligned rectangle meets the open region F: a rectangle corner lies
// in F, a corner of F lies in the rectangle, or a rectangle edge crosses a boundary piece.
inline bool rect_meets_region(const Body2D& body, const Extent2& ext, const Rect& r) {
    if (r.x1 < ext.xi_min || r.x0 > ext.xi_max || r.y1 < ext.eta_min || r.y0 > ext.eta_max) return false;
    const std::array<Point2, 4> corners{{{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}};
    for (const Point2& q : corners)
        if (region_contains_xieta(body.params, q)) return true;
    for (const Point2& q : ext.corners)
        if (r.contains(q)) return true;
    for (std::size_t e = 0; e < 4; ++e) {
        const Point2 a = corners[e], b = corners[(e + 1) % 4];
        const double len = distance(a, b);
        if (!(len > 0.0)) continue;
        const Ray2 edge{a, (b - a) / len};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto h = body.arcs[i].intersect(edge, 0.0);
            if (h && h->t <= len) return true;
        }
    }
    return false;
}

// Range of sqrt(x^2 + y^2) over a closed rectangle.
inline std::pair<double, double> radial_range(double x0, double x1, double y0, double y1) {
    const double nx = (x0 <= 0.0 && 0.0 <= x1) ? 0.0 : std::min(std::abs(x0), std::abs(x1));
    const double ny = (y0 <= 0.0 && 0.0 <= y1) ? 0.0 : std::min(std::abs(y0), std::abs(y1));
    const double fx = std::max(std::abs(x0), std::abs(x1)), fy = std::max(std::abs(y0), std::abs(y1));
    return {std::hypot(nx, ny), std::hypot(fx, fy)};
}

inline std::pair<double, double> abs_range(double z0, double z1) {
    if (z0 <= 0.0 && 0.0 <= z1) return {0.0, std::max(-z0, z1)};
    return {std::min(std::abs(z0), std::abs(z1)), std::max(std::abs(z0), std::abs(z1))};
}

}  // namespace detail

/// Marks every grid cell that meets the body's interior and counts 6-connected components of the
/// marked cells over a padded bounding box. A cell meets a solid of revolution iff its image in the
/// meridian half-plane, which is a rectangle, meets F; that test is exact, so thin corner wedges
/// do not fragment into spurious components.
inline ConnectivityResult connectivity_probe(const Body3D& body, std::size_t resolution) {
    detail::require_resolution(resolution);
    const auto e = detail::section_extent(body.section);
    std::array<double, 3> lo{}, hi{};
    if (body.kind == BodyKind::G1) {
        lo = {e.xi_min, -e.eta_max, -e.eta_max};
        hi = {e.xi_max, e.eta_max, e.eta_max};
    } else {
        lo = {-e.xi_max, -e.xi_max, -e.eta_max};
        hi = {e.xi_max, e.xi_max, e.eta_max};
    }
    std::array<double, 3> h{};
    for (int a = 0; a < 3; ++a) {
        const double pad = 0.02 * (hi[a] - lo[a]);
        lo[a] -= pad;
        hi[a] += pad;
        h[a] = (hi[a] - lo[a]) / static_cast<double>(resolution);
    }
    const std::size_t n = resolution;
    std::vector<std::uint8_t> occ(n * n * n, 0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const double x0 = lo[0] + i * h[0], y0 = lo[1] + j * h[1], z0 = lo[2] + k * h[2];
                detail::Rect r{};
                if (body.kind == BodyKind::G1) {
                    const auto [r0, r1] = detail::radial_range(y0, y0 + h[1], z0, z0 + h[2]);
                    r = {x0, x0 + h[0], r0, r1};
                } else {
                    const auto [r0, r1] = detail::radial_range(x0, x0 + h[0], y0, y0 + h[1]);
                    const auto [w0, w1] = detail::abs_range(z0, z0 + h[2]);
                    r = {r0, r1, w0, w1};
                }
                occ[i + n * (j + n * k)] = detail::rect_meets_region(body.section, e, r) ? 1 : 0;
            }
    auto res = detail::label_components(occ, {n, n, n});
    if (res.interior_cells == 0) throw InconclusiveProbe("connectivity_probe: no interior cells at this resolution");
    return res;
}

/// Planar variant over the section F and its mirror copy (4-connectivity).
inline ConnectivityResult connectivity_probe(const Body2D& body, std::size_t resolution) {
    detail::require_resolution(resolution);
    const auto e = detail::section_extent(body);
    double lo[2] = {e.xi_min, -e.eta_max}, hi[2] = {e.xi_max, e.eta_max}, h[2];
    for (int a = 0; a < 2; ++a) {
        const double pad = 0.02 * (hi[a] - lo[a]);
        lo[a] -= pad;
        hi[a] += pad;
        h[a] = (hi[a] - lo[a]) / static_cast<double>(resolution);
    }
    const std::size_t n = resolution;
    std::vector<std::uint8_t> occ(n * n, 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double x0 = lo[0] + i * h[0], y0 = lo[1] + j * h[1];
            const detail::Rect r{x0, x0 + h[0], y0, y0 + h[1]};
            const detail::Rect mirrored{x0, x0 + h[0], -(y0 + h[1]), -y0};
            occ[i + n * j] = detail::rect_meets_region(body, e, r) || detail::rect_meets_region(body, e, mirrored) ? 1 : 0;
        }
    auto res = detail::label_components(occ, {n, n, 1});
    if (res.interior_cells == 0) throw InconclusiveProbe("connectivity_probe: no interior cells at this resolution");
    return res;
}

// ---------------------------------------------------------------------------------------------
// Negative controls

enum class PerturbationMode { ScaleAlpha, ShiftFlatSegment, RotateHyperbola };

inline const char* to_string(PerturbationMode m) {
    switch (m) {
        case PerturbationMode::ScaleAlpha: return "alpha";
        case PerturbationMode::ShiftFlatSegment: return "shift";
        case PerturbationMode::RotateHyperbola: return "rotate";
    }
    return "?";
}

/// ScaleAlpha: alpha *= 1 + magnitude. ShiftFlatSegment: both k1 edges move magnitude*c along their
/// outward normal. RotateHyperbola: both hyperbolic arcs turn by magnitude radians about O.
struct Perturbation {
    PerturbationMode mode = PerturbationMode::ScaleAlpha;
    double magnitude = 0.0;
};

inline Body2D perturbed_body2d(const ConstructionParams& params, const Perturbation& pert) {
    if (!(pert.magnitude >= 0.0) || !std::isfinite(pert.magnitude))
        throw std::invalid_argument("perturbation magnitude must be non-negative");
    const double m = pert.magnitude;
    switch (pert.mode) {
        case PerturbationMode::ScaleAlpha: {
            ConstructionParams broken = params;
            broken.alpha *= 1.0 + m;
            return assemble_body2d(broken, build_region_unchecked(broken));
        }
        case PerturbationMode::ShiftFlatSegment: {
            auto region = build_region(params);
            BoundaryArc& edge = region[3];
            const Vec2 outward = normalized(Vec2{params.k1, -1.0});
            edge.p0 = edge.p0 + outward * (m * params.c);
            edge.p1 = edge.p1 + outward * (m * params.c);
            return assemble_body2d(params, region);
        }
        case PerturbationMode::RotateHyperbola: {
            Body2D body = build_body2d(params);
            const FrameMap place = FrameMap::canonical(params.c, params.gamma);
            for (BoundaryArc& arc : body.arcs) {
                if (arc.role != ArcRole::Hyperbola) continue;
                arc.frame = arc.mirrored_copy ? place.then_rotate(m).then_mirror() : place.then_rotate(m);
            }
            return body;
        }
    }
    throw std::invalid_argument("unknown perturbation");
}

inline InvisibilityReport negative_control(const ConstructionParams& params, const Perturbation& pert, std::size_t n,
                                           const Tolerances& tol = {}, unsigned threads = 0) {
    const Body2D body = perturbed_body2d(params, pert);
    auto rep = verify_invisibility(body, Sampling{}, n, tol, threads);
    rep.c = params.c;
    rep.kappa = params.kappa;
    rep.k1 = params.k1;
    rep.k2 = params.k2;
    rep.expected_delay = 2.0 * (params.a - params.alpha);
    rep.perturbation = pert.magnitude == 0.0 ? std::string("none")
                                             : std::string(to_string(pert.mode)) + ":" + std::to_string(pert.magnitude);
    return rep;
}

}  // namespace invis
