#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "invis/billiard.hpp"
#include "invis/construction.hpp"
#include "invis/verify.hpp"

namespace invis {

// ---------------------------------------------------------------------------------------------
// Adaptive arc sampling

inline constexpr std::size_t kMaxArcPoints = std::size_t{1} << 12;
inline constexpr int kMaxArcDepth = std::bit_width(kMaxArcPoints) - 1;

namespace detail {

inline double chord_deviation(Point2 a, Point2 b, Point2 m) {
    const Vec2 e = b - a;
    const double len = norm(e);
    if (len == 0.0) return distance(a, m);
    const double s = std::clamp(dot(m - a, e) / (len * len), 0.0, 1.0);
    return distance(a + e * s, m);
}

inline void refine(const BoundaryArc& arc, double s0, Point2 p0, double s1, Point2 p1, double tol, int depth,
                   std::vector<Point2>& out) {
    const double sm = 0.5 * (s0 + s1);
    const Point2 pm = arc.point_at(sm);
    if (depth >= kMaxArcDepth || chord_deviation(p0, p1, pm) <= tol) {
        out.push_back(p1);
        return;
    }
    refine(arc, s0, p0, sm, pm, tol, depth + 1, out);
    refine(arc, sm, pm, s1, p1, tol, depth + 1, out);
}

}  // namespace detail

/// Polyline through the arc (body coordinates) whose chords deviate from the curve by at most
/// `chord_tol` at every bisection midpoint; at most 2^12 + 1 points.
inline std::vector<Point2> sample_arc(const BoundaryArc& arc, double chord_tol) {
    if (!(chord_tol > 0.0)) throw std::invalid_argument("sample_arc: chord tolerance must be positive");
    std::vector<Point2> pts{arc.point_at(0.0)};
    if (arc.kind == ArcKind::FlatSegment) {
        pts.push_back(arc.point_at(1.0));
        return pts;
    }
    detail::refine(arc, 0.0, pts.front(), 1.0, arc.point_at(1.0), chord_tol, 0, pts);
    return pts;
}

/// Closed boundary loop of F (the unmirrored copy) in body coordinates, counter-clockwise.
inline std::vector<Point2> section_profile(const Body2D& body, double chord_tol) {
    if (body.arcs.size() < 4) throw std::invalid_argument("section_profile: body has no boundary");
    std::vector<Point2> loop;
    auto append = [&](std::vector<Point2> pts, bool reverse) {
        if (reverse) std::reverse(pts.begin(), pts.end());
        for (const Point2& q : pts)
            if (loop.empty() || distance(loop.back(), q) > 1e-12 * body.scale()) loop.push_back(q);
    };
    append(sample_arc(body.arcs[0], chord_tol), false);  // A1 -> A2
    append(sample_arc(body.arcs[1], chord_tol), false);  // A2 -> B2
    append(sample_arc(body.arcs[2], chord_tol), true);   // B2 -> B1
    append(sample_arc(body.arcs[3], chord_tol), true);   // B1 -> A1
    if (loop.size() > 1 && distance(loop.front(), loop.back()) <= 1e-9 * body.scale()) loop.pop_back();
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) area += cross(loop[i], loop[(i + 1) % loop.size()]);
    if (area < 0.0) std::reverse(loop.begin(), loop.end());
    return loop;
}

// ---------------------------------------------------------------------------------------------
// Meshes

struct MeshGroup {
    std::string name;
    std::size_t first_triangle = 0;
    std::size_t triangle_count = 0;
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<Vec3> normals;  // per vertex
    std::vector<MeshGroup> groups;
    std::string axis_note;
};

inline Vec3 triangle_normal(const TriangleMesh& m, const std::array<std::uint32_t, 3>& tri) {
    return cross(m.vertices[tri[1]] - m.vertices[tri[0]], m.vertices[tri[2]] - m.vertices[tri[0]]);
}

namespace detail {

// Revolves a closed profile (axial, radial) and appends it as one closed component with outward winding.
inline void append_revolution(TriangleMesh& mesh, const std::vector<Point2>& profile, std::size_t segments,
                              bool g1_axes, double axial_sign, const std::string& name) {
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    const std::size_t m = profile.size();
    for (std::size_t i = 0; i < segments; ++i) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segments);
        const double cp = std::cos(phi), sp = std::sin(phi);
        for (const Point2& q : profile) {
            // q = (xi, eta); G1 turns eta about the xi axis, G2 turns xi about the eta axis
            if (g1_axes)
                mesh.vertices.push_back({q.x, q.y * cp, q.y * sp});
            else
                mesh.vertices.push_back({q.x * cp, q.x * sp, axial_sign * q.y});
        }
    }
    const std::size_t first = mesh.triangles.size();
    auto idx = [&](std::size_t ring, std::size_t j) {
        return base + static_cast<std::uint32_t>((ring % segments) * m + (j % m));
    };
    for (std::size_t i = 0; i < segments; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const auto a = idx(i, j), b = idx(i, j + 1), c = idx(i + 1, j + 1), d = idx(i + 1, j);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    // signed volume decides the winding
    double volume = 0.0;
    for (std::size_t t = first; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        volume += dot(mesh.vertices[tri[0]], cross(mesh.vertices[tri[1]], mesh.vertices[tri[2]]));
    }
    if (volume < 0.0)
        for (std::size_t t = first; t < mesh.triangles.size(); ++t) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
    mesh.groups.push_back({name, first, mesh.triangles.size() - first});
}

inline void compute_vertex_normals(TriangleMesh& mesh) {
    mesh.normals.assign(mesh.vertices.size(), Vec3{});
    for (const auto& tri : mesh.triangles) {
        const Vec3 n = triangle_normal(mesh, tri);  // area weighted
        for (auto v : tri) mesh.normals[v] = mesh.normals[v] + n;
    }
    for (Vec3& n : mesh.normals) n = norm(n) > 0.0 ? n / norm(n) : Vec3{0, 0, 1};
}

}  // namespace detail

/// Triangulated boundary of G1 (one closed component, axis +X) or G2 (two closed components, axis +Z).
inline TriangleMesh revolve_mesh(const Body3D& body, std::size_t segments, double chord_tol) {
    if (segments < 16) throw std::invalid_argument("revolve_mesh: need at least 16 azimuthal segments");
    if (!(chord_tol > 0.0)) throw std::invalid_argument("revolve_mesh: chord tolerance must be positive");
    const auto profile = section_profile(body.section, chord_tol * body.scale());
    TriangleMesh mesh;
    if (body.kind == BodyKind::G1) {
        mesh.axis_note = "G1: revolution about the xi axis, mapped to +X";
        detail::append_revolution(mesh, profile, segments, true, 1.0, "g1");
    } else {
        mesh.axis_note = "G2: revolution about the eta axis, mapped to +Z";
        detail::append_revolution(mesh, profile, segments, false, 1.0, "g2_upper");
        detail::append_revolution(mesh, profile, segments, false, -1.0, "g2_lower");
    }
    detail::compute_vertex_normals(mesh);
    return mesh;
}

struct MeshTopology {
    std::size_t vertices = 0, edges = 0, faces = 0;
    std::size_t non_manifold_edges = 0;  // edges not shared by exactly two triangles
    std::size_t components = 0;
    long long euler() const {
        return static_cast<long long>(vertices) - static_cast<long long>(edges) + static_cast<long long>(faces);
    }
    bool watertight() const { return non_manifold_edges == 0; }
};

inline MeshTopology mesh_topology(const TriangleMesh& mesh) {
    MeshTopology topo;
    topo.vertices = mesh.vertices.size();
    topo.faces = mesh.triangles.size();
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
    std::vector<std::uint32_t> parent(mesh.vertices.size());
    for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const auto a = tri[e], b = tri[(e + 1) % 3];
            ++edge_use[{std::min(a, b), std::max(a, b)}];
            parent[find(a)] = find(b);
        }
    topo.edges = edge_use.size();
    for (const auto& [edge, uses] : edge_use)
        if (uses != 2) ++topo.non_manifold_edges;
    std::vector<std::uint8_t> used(mesh.vertices.size(), 0);
    for (const auto& tri : mesh.triangles)
        for (auto v : tri) used[v] = 1;
    for (std::uint32_t i = 0; i < parent.size(); ++i)
        if (used[i] && find(i) == i) ++topo.components;
    return topo;
}

// ---------------------------------------------------------------------------------------------
// OBJ / STL

inline std::string write_obj(const TriangleMesh& mesh) {
    if (mesh.triangles.empty()) throw std::invalid_argument("write_obj: empty mesh");
    std::string out;
    out += "# invis revolved body\n";
    if (!mesh.axis_note.empty()) out += "# " + mesh.axis_note + "\n";
    fmt::format_to(std::back_inserter(out), "# vertices {} triangles {}\n", mesh.vertices.size(), mesh.triangles.size());
    for (const Vec3& v : mesh.vertices) fmt::format_to(std::back_inserter(out), "v {:.12g} {:.12g} {:.12g}\n", v.x, v.y, v.z);
    for (const Vec3& n : mesh.normals) fmt::format_to(std::back_inserter(out), "vn {:.9g} {:.9g} {:.9g}\n", n.x, n.y, n.z);
    const bool with_normals = mesh.normals.size() == mesh.vertices.size();
    auto faces = [&](std::size_t first, std::size_t count) {
        for (std::size_t t = first; t < first + count; ++t) {
            const auto& tri = mesh.triangles[t];
            if (with_normals)
                fmt::format_to(std::back_inserter(out), "f {0}//{0} {1}//{1} {2}//{2}\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
            else
                fmt::format_to(std::back_inserter(out), "f {} {} {}\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
        }
    };
    if (mesh.groups.empty()) {
        faces(0, mesh.triangles.size());
    } else {
        for (const MeshGroup& g : mesh.groups) {
            out += "o " + g.name + "\n";
            faces(g.first_triangle, g.triangle_count);
        }
    }
    return out;
}

namespace detail {
inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_f32(std::string& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
}  // namespace detail

/// Binary little-endian STL: 80-byte header, uint32 count, 50 bytes per triangle.
inline std::string write_stl(const TriangleMesh& mesh) {
    if (mesh.triangles.empty()) throw std::invalid_argument("write_stl: empty mesh");
    std::string out;
    out.reserve(84 + 50 * mesh.triangles.size());
    std::string header = "invis binary STL; " + (mesh.axis_note.empty() ? std::string("revolved body") : mesh.axis_note);
    header.resize(80, ' ');
    out += header;
    detail::put_u32(out, static_cast<std::uint32_t>(mesh.triangles.size()));
    for (const auto& tri : mesh.triangles) {
        const Vec3 n = triangle_normal(mesh, tri);
        const Vec3 un = norm(n) > 0.0 ? n / norm(n) : Vec3{};
        for (double v : {un.x, un.y, un.z}) detail::put_f32(out, v);
        for (auto idx : tri)
            for (double v : {mesh.vertices[idx].x, mesh.vertices[idx].y, mesh.vertices[idx].z}) detail::put_f32(out, v);
        out.push_back('\0');
        out.push_back('\0');
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Reports

inline nlohmann::ordered_json report_to_json(const InvisibilityReport& r) {
    nlohmann::ordered_json j;
    j["params"] = {{"c", r.c}, {"kappa", r.kappa}, {"k1", r.k1}, {"k2", r.k2}};
    j["body"] = r.body;
    j["sampling"] = r.sampling;
    j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
    j["perturbation"] = r.perturbation;
    j["samples"] = r.samples;
    j["counts"] = {{"miss", r.counts.miss},         {"invisible", r.counts.invisible}, {"deviated", r.counts.deviated},
                   {"stuck", r.counts.stuck},       {"grazing", r.counts.grazing}};
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [bounces, count] : r.bounce_histogram) hist[std::to_string(bounces)] = count;
    j["bounce_histogram"] = hist;
    j["three_bounce"] = r.three_bounce;
    j["second_hit_not_flat"] = r.second_hit_not_flat;
    j["max_angle_deviation"] = r.max_angle_deviation;
    j["max_line_offset"] = r.max_line_offset;
    j["max_second_hit_error"] = r.max_second_hit_error;
    j["delay"] = {{"expected", r.expected_delay}, {"min", r.delay_min}, {"max", r.delay_max}, {"spread", r.delay_spread()}};
    j["wall_time_s"] = r.wall_time_s;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["verdict"] = r.passed() ? "invisible" : "failed";
    return j;
}

inline std::string write_report(const InvisibilityReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline InvisibilityReport read_report(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    InvisibilityReport r;
    const auto& p = j.at("params");
    r.c = p.at("c").get<double>();
    r.kappa = p.at("kappa").get<double>();
    r.k1 = p.at("k1").get<double>();
    r.k2 = p.at("k2").get<double>();
    r.body = j.at("body").get<std::string>();
    r.sampling = j.at("sampling").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    r.perturbation = j.at("perturbation").get<std::string>();
    r.samples = j.at("samples").get<std::size_t>();
    const auto& c = j.at("counts");
    r.counts.miss = c.at("miss").get<std::size_t>();
    r.counts.invisible = c.at("invisible").get<std::size_t>();
    r.counts.deviated = c.at("deviated").get<std::size_t>();
    r.counts.stuck = c.at("stuck").get<std::size_t>();
    r.counts.grazing = c.at("grazing").get<std::size_t>();
    for (const auto& [k, v] : j.at("bounce_histogram").items()) r.bounce_histogram[std::stoi(k)] = v.get<std::size_t>();
    r.three_bounce = j.at("three_bounce").get<std::size_t>();
    r.second_hit_not_flat = j.at("second_hit_not_flat").get<std::size_t>();
    r.max_angle_deviation = j.at("max_angle_deviation").get<double>();
    r.max_line_offset = j.at("max_line_offset").get<double>();
    r.max_second_hit_error = j.at("max_second_hit_error").get<double>();
    const auto& d = j.at("delay");
    r.expected_delay = d.at("expected").get<double>();
    r.delay_min = d.at("min").get<double>();
    r.delay_max = d.at("max").get<double>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    return r;
}

// ---------------------------------------------------------------------------------------------
// SVG

struct ViewBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // body coordinates (eta up)
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Point2 q) const { return q.x >= x0 && q.x <= x1 && q.y >= y0 && q.y <= y1; }
    bool strictly_contains(Point2 q) const { return q.x > x0 && q.x < x1 && q.y > y0 && q.y < y1; }
};

struct StrokeStyle {
    std::string color;
    double width = 0.02;
};

struct PlotSpec {
    std::optional<ViewBox> view;  // derived from the body and rays when empty
    std::map<ArcKind, StrokeStyle> arc_styles{{ArcKind::EllipticArc, {"#1f5fa8", 0.025}},
                                              {ArcKind::HyperbolicArc, {"#b8322a", 0.025}},
                                              {ArcKind::FlatSegment, {"#2b2b2b", 0.025}}};
    StrokeStyle ray_style{"#e08a00", 0.012};
    bool show_foci = true;
    bool show_c = true;
    bool show_ab = true;
    double pixel_width = 800.0;
};

namespace detail {

inline void grow(ViewBox& b, Point2 q) {
    b.x0 = std::min(b.x0, q.x);
    b.x1 = std::max(b.x1, q.x);
    b.y0 = std::min(b.y0, q.y);
    b.y1 = std::max(b.y1, q.y);
}

inline ViewBox empty_box() {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, -inf, -inf};
}

// Parameter at which the ray leaves the (convex) view box.
inline double exit_parameter(const ViewBox& b, Point2 o, Vec2 d) {
    double t = std::numeric_limits<double>::infinity();
    if (d.x > 0.0) t = std::min(t, (b.x1 - o.x) / d.x);
    if (d.x < 0.0) t = std::min(t, (b.x0 - o.x) / d.x);
    if (d.y > 0.0) t = std::min(t, (b.y1 - o.y) / d.y);
    if (d.y < 0.0) t = std::min(t, (b.y0 - o.y) / d.y);
    return std::max(0.0, t);
}

}  // namespace detail

inline ViewBox body_bounds(const Body2D& body) {
    ViewBox b = detail::empty_box();
    for (const BoundaryArc& arc : body.arcs)
        for (const Point2& q : sample_arc(arc, 1e-4 * body.scale())) detail::grow(b, q);
    return b;
}

/// Renders the body (one polyline per boundary piece) and trajectories (O, hits, exit clipped to
/// the view box) as an SVG 1.1 document. SVG y runs downward, so points are written as (xi, -eta).
inline std::string render_svg(const Body2D& body, std::span<const Trajectory2> rays, const PlotSpec& spec = {}) {
    if (body.arcs.empty()) throw std::invalid_argument("render_svg: empty body");
    const ViewBox bounds = body_bounds(body);
    ViewBox view;
    if (spec.view) {
        view = *spec.view;
        if (!(view.x0 < bounds.x0 && view.x1 > bounds.x1 && view.y0 < bounds.y0 && view.y1 > bounds.y1))
            throw std::invalid_argument("render_svg: view box must strictly contain the body");
    } else {
        view = bounds;
        detail::grow(view, {0.0, 0.0});
        for (const Trajectory2& tr : rays)
            for (const auto& h : tr.hits) detail::grow(view, h.point);
        const double margin = 0.08 * std::max(view.width(), view.height());
        view = {view.x0 - margin, view.y0 - margin, view.x1 + margin, view.y1 + margin};
    }
    const double size = std::max(view.width(), view.height());
    const double chord_tol = 0.5e-3 * size;
    auto pt = [](Point2 q) { return fmt::format("{:.6f},{:.6f}", q.x, -q.y); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    fmt::format_to(std::back_inserter(out),
                   "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" height=\"{:.0f}\" "
                   "viewBox=\"{:.6f} {:.6f} {:.6f} {:.6f}\">\n",
                   spec.pixel_width, spec.pixel_width * view.height() / view.width(), view.x0, -view.y1, view.width(),
                   view.height());
    fmt::format_to(std::back_inserter(out),
                   "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
                   "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"{}\"/>"
                   "</marker></defs>\n",
                   spec.ray_style.color);
    const ConstructionParams& p = body.params;
    fmt::format_to(std::back_inserter(out), "  <title>c={} kappa={} k1={} k2={}</title>\n", p.c, p.kappa, p.k1, p.k2);

    out += "  <g id=\"body\" fill=\"none\" stroke-linecap=\"round\">\n";
    for (std::size_t i = 0; i < body.arcs.size(); ++i) {
        const BoundaryArc& arc = body.arcs[i];
        const auto it = spec.arc_styles.find(arc.kind);
        const StrokeStyle style = it != spec.arc_styles.end() ? it->second : StrokeStyle{"#000000", 0.02};
        fmt::format_to(std::back_inserter(out),
                       "    <polyline class=\"arc arc-{}\" data-role=\"{}\" data-copy=\"{}\" stroke=\"{}\" "
                       "stroke-width=\"{:.4f}\" points=\"",
                       to_string(arc.kind), to_string(arc.role), arc.mirrored_copy ? "mirror" : "primary", style.color,
                       style.width * p.c);
        const auto pts = sample_arc(arc, chord_tol);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k) out += ' ';
            out += pt(pts[k]);
        }
        out += "\"/>\n";
    }
    out += "  </g>\n";

    out += "  <g id=\"rays\" fill=\"none\">\n";
    for (const Trajectory2& tr : rays) {
        std::vector<Point2> poly{tr.initial.origin};
        for (const auto& h : tr.hits) poly.push_back(h.point);
        const double te = detail::exit_parameter(view, tr.exit.origin, tr.exit.direction);
        Point2 end = tr.exit.origin + tr.exit.direction * te;
        end = {std::clamp(end.x, view.x0, view.x1), std::clamp(end.y, view.y0, view.y1)};
        poly.push_back(end);
        fmt::format_to(std::back_inserter(out),
                       "    <polyline class=\"ray\" stroke=\"{}\" stroke-width=\"{:.4f}\" marker-end=\"url(#arrow)\" points=\"",
                       spec.ray_style.color, spec.ray_style.width * p.c);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            if (k) out += ' ';
            out += pt(poly[k]);
        }
        out += "\"/>\n";
    }
    out += "  </g>\n";

    out += "  <g id=\"annotations\" font-family=\"sans-serif\">\n";
    const double r = 0.02 * size, fs = 0.035 * size;
    const FrameMap place = FrameMap::canonical(p.c, p.gamma);
    auto mark = [&](Point2 q, const char* label, const char* color) {
        if (!view.contains(q)) return;
        fmt::format_to(std::back_inserter(out),
                       "    <circle class=\"mark\" cx=\"{:.6f}\" cy=\"{:.6f}\" r=\"{:.6f}\" fill=\"{}\"/>"
                       "<text x=\"{:.6f}\" y=\"{:.6f}\" font-size=\"{:.6f}\">{}</text>\n",
                       q.x, -q.y, r * 0.5, color, std::min(q.x + r, view.x1 - 3.0 * fs),
                       std::max(-q.y - r, -view.y1 + fs), fs, label);
    };
    if (spec.show_foci) {
        mark({0.0, 0.0}, "O=F1", "#000000");
        mark(place.forward(p.focus2()), "F2", "#000000");
    }
    if (spec.show_c) mark(place.forward(intersection_point_C(p)), "C", "#555555");
    if (spec.show_ab && body.arcs.size() >= 4) {
        mark(body.arcs[3].point_at(0.0), "A", "#1f5fa8");
        mark(body.arcs[3].point_at(1.0), "B", "#b8322a");
    }
    out += "  </g>\n</svg>\n";
    return out;
}

}  // namespace invis
