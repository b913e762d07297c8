#include <cmath>
#include <cstring>
#include <numbers>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "invis/io_export.hpp"
#include "support.hpp"

using namespace invis;
using invis::testing::default_params;

namespace {

const Body2D& default_body() {
    static const Body2D body = build_body2d(default_params());
    return body;
}

TriangleMesh one_triangle() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    m.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
    return m;
}

std::uint32_t read_u32(const std::string& s, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
    return v;
}

float read_f32(const std::string& s, std::size_t at) { return std::bit_cast<float>(read_u32(s, at)); }

// Largest distance from the revolved surface to the mesh, probed at facet centroids: for a
// surface of revolution the true radius at the centroid's axial position is known from the profile.
double max_azimuthal_sagitta(const TriangleMesh& mesh) {
    double worst = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const Vec3 g = (a + b + c) / 3.0;
        const double r_mesh = std::hypot(g.y, g.z);
        const double r_true = (std::hypot(a.y, a.z) + std::hypot(b.y, b.z) + std::hypot(c.y, c.z)) / 3.0;
        worst = std::max(worst, r_true - r_mesh);
    }
    return worst;
}

struct Tag {
    std::string name;
    std::map<std::string, std::string> attrs;
};

// Minimal XML reader for the documents this library writes: checks nesting and collects element attributes.
std::vector<Tag> parse_xml(const std::string& doc) {
    std::vector<Tag> tags;
    std::vector<std::string> stack;
    const std::regex attr_re(R"re(([\w:-]+)="([^"]*)")re");
    std::size_t pos = 0;
    while ((pos = doc.find('<', pos)) != std::string::npos) {
        const std::size_t end = doc.find('>', pos);
        if (end == std::string::npos) throw std::runtime_error("unterminated tag");
        std::string body = doc.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (body.starts_with("?")) continue;
        if (body.starts_with("/")) {
            if (stack.empty() || stack.back() != body.substr(1)) throw std::runtime_error("mismatched </" + body.substr(1) + ">");
            stack.pop_back();
            continue;
        }
        const bool self_closing = body.ends_with("/");
        if (self_closing) body.pop_back();
        Tag t;
        t.name = body.substr(0, body.find_first_of(" \n"));
        for (auto it = std::sregex_iterator(body.begin(), body.end(), attr_re); it != std::sregex_iterator(); ++it)
            t.attrs[(*it)[1]] = (*it)[2];
        tags.push_back(t);
        if (!self_closing) stack.push_back(t.name);
    }
    if (!stack.empty()) throw std::runtime_error("unclosed <" + stack.back() + ">");
    return tags;
}

std::vector<Point2> parse_points(const std::string& s) {
    std::vector<Point2> out;
    std::istringstream in(s);
    std::string pair;
    while (in >> pair) {
        const auto comma = pair.find(',');
        out.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
    }
    return out;
}

}  // namespace

TEST(SampleArc, ChordErrorBelowTolerance) {
    for (const BoundaryArc& arc : default_body().arcs) {
        for (double tol : {1e-2, 1e-4, 1e-6}) {
            const auto pts = sample_arc(arc, tol);
            ASSERT_GE(pts.size(), 2u);
            ASSERT_LE(pts.size(), kMaxArcPoints + 1);
            // dense check between consecutive samples against the true curve
            const double dist_start = distance(pts.front(), arc.point_at(0.0));
            const double dist_end = distance(pts.back(), arc.point_at(1.0));
            ASSERT_LT(dist_start + dist_end, 1e-14);
            if (arc.kind == ArcKind::FlatSegment) continue;
            for (int i = 0; i <= 400; ++i) {
                const Point2 q = arc.point_at(i / 400.0);
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k + 1 < pts.size(); ++k) best = std::min(best, detail::chord_deviation(pts[k], pts[k + 1], q));
                ASSERT_LT(best, 1.05 * tol);
            }
        }
    }
    EXPECT_THROW(sample_arc(default_body().arcs[0], 0.0), std::invalid_argument);
}

TEST(SampleArc, HardCapOnPoints) {
    const auto pts = sample_arc(default_body().arcs[2], 1e-300);
    EXPECT_EQ(pts.size(), kMaxArcPoints + 1);
}

TEST(Profile, ClosedCounterClockwiseLoop) {
    const auto loop = section_profile(default_body(), 1e-3);
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) area += cross(loop[i], loop[(i + 1) % loop.size()]);
    EXPECT_GT(area, 0.0);
    for (const Point2& q : loop) EXPECT_GT(q.y, 0.0);
}

TEST(Mesh, G1IsOneWatertightTorus) {
    const Body3D g1 = make_body3d(BodyKind::G1, default_body());
    const TriangleMesh mesh = revolve_mesh(g1, 64, 1e-3);
    const MeshTopology topo = mesh_topology(mesh);
    EXPECT_EQ(topo.euler(), 0);
    EXPECT_TRUE(topo.watertight());
    EXPECT_EQ(topo.non_manifold_edges, 0u);
    EXPECT_EQ(topo.components, 1u);
    ASSERT_EQ(mesh.groups.size(), 1u);
    EXPECT_EQ(mesh.groups[0].name, "g1");
    EXPECT_NE(mesh.axis_note.find("+X"), std::string::npos);
}

TEST(Mesh, G2IsTwoClosedComponents) {
    const Body3D g2 = make_body3d(BodyKind::G2, default_body());
    const TriangleMesh mesh = revolve_mesh(g2, 64, 1e-3);
    const MeshTopology topo = mesh_topology(mesh);
    EXPECT_EQ(topo.components, 2u);
    EXPECT_TRUE(topo.watertight());
    EXPECT_EQ(topo.euler(), 0);
    ASSERT_EQ(mesh.groups.size(), 2u);
    EXPECT_EQ(mesh.groups[0].name, "g2_upper");
    EXPECT_EQ(mesh.groups[1].name, "g2_lower");
    EXPECT_NE(mesh.axis_note.find("+Z"), std::string::npos);
}

TEST(Mesh, VerticesOnTheBoundaryAndFacetsWellFormed) {
    const double chord_tol = 1e-3;
    for (BodyKind kind : {BodyKind::G1, BodyKind::G2}) {
        const Body3D body = make_body3d(kind, default_body());
        const TriangleMesh mesh = revolve_mesh(body, 32, chord_tol);
        for (const Vec3& v : mesh.vertices)
            ASSERT_EQ(classify_point(body, v, 2.0 * chord_tol * body.scale()), Membership::Boundary);
        ASSERT_EQ(mesh.normals.size(), mesh.vertices.size());
        for (const Vec3& n : mesh.normals) ASSERT_TRUE(is_unit(n, 1e-12));
        // outward winding: orientation is consistent (each directed edge once, its reverse once) and
        // every closed component encloses positive signed volume
        std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
        for (const auto& tri : mesh.triangles) {
            const Vec3 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
            ASSERT_GT(norm(cross(b - a, c - a)) * 0.5, 1e-12);
            for (int e = 0; e < 3; ++e) ++directed[{tri[e], tri[(e + 1) % 3]}];
        }
        for (const auto& [edge, count] : directed) {
            ASSERT_EQ(count, 1);
            ASSERT_EQ(directed.count({edge.second, edge.first}), 1u);
        }
        for (const MeshGroup& g : mesh.groups) {
            double volume = 0.0;
            for (std::size_t t = g.first_triangle; t < g.first_triangle + g.triangle_count; ++t) {
                const auto& tri = mesh.triangles[t];
                volume += dot(mesh.vertices[tri[0]], cross(mesh.vertices[tri[1]], mesh.vertices[tri[2]])) / 6.0;
            }
            EXPECT_GT(volume, 0.0) << g.name;
        }
    }
}

TEST(Mesh, AzimuthalErrorConvergesOnRefinement) {
    const Body3D g1 = make_body3d(BodyKind::G1, default_body());
    const double e32 = max_azimuthal_sagitta(revolve_mesh(g1, 32, 1e-4));
    const double e64 = max_azimuthal_sagitta(revolve_mesh(g1, 64, 1e-4));
    const double e128 = max_azimuthal_sagitta(revolve_mesh(g1, 128, 1e-4));
    EXPECT_GT(e32 / e64, 2.0);
    EXPECT_GT(e64 / e128, 2.0);
}

TEST(Mesh, RejectsTooFewSegments) {
    const Body3D g1 = make_body3d(BodyKind::G1, default_body());
    EXPECT_THROW(revolve_mesh(g1, 8, 1e-3), std::invalid_argument);
    EXPECT_THROW(revolve_mesh(g1, 64, 0.0), std::invalid_argument);
}

TEST(Stl, SingleTriangleIs134Bytes) {
    const std::string stl = write_stl(one_triangle());
    ASSERT_EQ(stl.size(), 134u);
    EXPECT_EQ(read_u32(stl, 80), 1u);
    EXPECT_FLOAT_EQ(read_f32(stl, 84 + 8), 1.0f);  // normal z
    EXPECT_FLOAT_EQ(read_f32(stl, 84 + 12 + 12), 1.0f);  // second vertex x
    EXPECT_EQ(stl[132], 0);
    EXPECT_EQ(stl[133], 0);
}

TEST(Stl, CountFieldMatchesAndValuesFinite) {
    const TriangleMesh mesh = revolve_mesh(make_body3d(BodyKind::G2, default_body()), 32, 1e-3);
    const std::string stl = write_stl(mesh);
    ASSERT_EQ(stl.size(), 84 + 50 * mesh.triangles.size());
    EXPECT_EQ(read_u32(stl, 80), mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 12; ++k) ASSERT_TRUE(std::isfinite(read_f32(stl, 84 + 50 * t + 4 * k)));
    EXPECT_NE(stl.substr(0, 80).find("+Z"), std::string::npos);
}

TEST(Export, EmptyMeshRejected) {
    EXPECT_THROW(write_stl(TriangleMesh{}), std::invalid_argument);
    EXPECT_THROW(write_obj(TriangleMesh{}), std::invalid_argument);
}

TEST(Obj, RoundTripToNineDigits) {
    const TriangleMesh mesh = revolve_mesh(make_body3d(BodyKind::G2, default_body()), 24, 1e-3);
    const std::string obj = write_obj(mesh);
    std::istringstream in(obj);
    std::string line;
    std::vector<Vec3> verts;
    std::size_t faces = 0, objects = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            verts.push_back(v);
        } else if (tag == "f") {
            ++faces;
            std::string ref;
            while (ls >> ref) {
                const long i = std::stol(ref.substr(0, ref.find('/')));
                ASSERT_GE(i, 1);
                ASSERT_LE(static_cast<std::size_t>(i), mesh.vertices.size());
            }
        } else if (tag == "o") {
            ++objects;
        }
    }
    ASSERT_EQ(verts.size(), mesh.vertices.size());
    EXPECT_EQ(faces, mesh.triangles.size());
    EXPECT_EQ(objects, 2u);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const Vec3 a = verts[i], b = mesh.vertices[i];
        for (auto [x, y] : {std::pair{a.x, b.x}, std::pair{a.y, b.y}, std::pair{a.z, b.z}}) {
            ASSERT_LE(std::abs(x - y), 1e-9 * std::max(1.0, std::abs(y)));
        }
    }
}

TEST(Report, RoundTripPreservesEverything) {
    const Body3D g1 = make_body3d(BodyKind::G1, default_body());
    InvisibilityReport rep = verify_invisibility(g1, Sampling{SamplingMode::UniformSphere, 9}, 3000);
    rep.config = {{"c", "1"}, {"body", "g1"}};
    const std::string text = write_report(rep);
    const InvisibilityReport back = read_report(text);
    EXPECT_EQ(back.counts, rep.counts);
    EXPECT_EQ(back.bounce_histogram, rep.bounce_histogram);
    EXPECT_EQ(back.seed, rep.seed);
    EXPECT_EQ(back.samples, rep.samples);
    EXPECT_EQ(back.body, "g1");
    EXPECT_EQ(back.max_angle_deviation, rep.max_angle_deviation);
    EXPECT_EQ(back.delay_min, rep.delay_min);
    EXPECT_EQ(back.config, rep.config);
    // stable key order and bit-stable output
    EXPECT_EQ(write_report(back), text);
    EXPECT_LT(text.find("\"params\""), text.find("\"counts\""));
    EXPECT_NE(text.find("\"verdict\": \"invisible\""), std::string::npos);
}

TEST(Svg, BodyOnlyHasEightArcs) {
    const std::string svg = render_svg(default_body(), {});
    const auto tags = parse_xml(svg);
    std::size_t arcs = 0;
    for (const Tag& t : tags)
        if (t.name == "polyline" && t.attrs.at("class").starts_with("arc ")) ++arcs;
    EXPECT_EQ(arcs, 8u);
}

TEST(Svg, TrajectoryPolylineAndCoordinatesInsideView) {
    const Body2D& body = default_body();
    const std::vector<Trajectory2> rays{trace2d(body, {{0, 0}, polar_unit(std::atan(0.8) - body.params.gamma)})};
    const std::string svg = render_svg(body, rays);
    const auto tags = parse_xml(svg);
    ASSERT_FALSE(tags.empty());
    ASSERT_EQ(tags[0].name, "svg");
    std::istringstream vb(tags[0].attrs.at("viewBox"));
    double x0, y0, w, h;
    vb >> x0 >> y0 >> w >> h;
    auto inside = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && x >= x0 - 1e-6 && x <= x0 + w + 1e-6 && y >= y0 - 1e-6 && y <= y0 + h + 1e-6;
    };
    std::size_t ray_lines = 0;
    for (const Tag& t : tags) {
        if (t.name == "polyline") {
            const auto pts = parse_points(t.attrs.at("points"));
            for (const Point2& q : pts) ASSERT_TRUE(inside(q.x, q.y)) << q.x << "," << q.y;
            if (t.attrs.at("class") == "ray") {
                ++ray_lines;
                EXPECT_EQ(pts.size(), 5u);
            }
        }
        if (t.name == "circle") {
            ASSERT_TRUE(inside(std::stod(t.attrs.at("cx")), std::stod(t.attrs.at("cy"))));
        }
        if (t.name == "text") {
            ASSERT_TRUE(inside(std::stod(t.attrs.at("x")), std::stod(t.attrs.at("y"))));
        }
    }
    EXPECT_EQ(ray_lines, 1u);
}

TEST(Svg, ArcPolylinesFollowTheConics) {
    // every rendered vertex of a conic arc lies on its carrying curve, and the polyline is fine
    // enough: chord error below 1e-3 of the view size
    const Body2D& body = default_body();
    const std::string svg = render_svg(body, {});
    const auto tags = parse_xml(svg);
    std::istringstream vb(tags[0].attrs.at("viewBox"));
    double x0, y0, w, h;
    vb >> x0 >> y0 >> w >> h;
    std::size_t i = 0;
    for (const Tag& t : tags) {
        if (t.name != "polyline" || !t.attrs.at("class").starts_with("arc ")) continue;
        const BoundaryArc& arc = body.arcs[i++];
        auto pts = parse_points(t.attrs.at("points"));
        for (Point2& q : pts) q.y = -q.y;
        for (const Point2& q : pts) {
            const Point2 local = arc.frame.inverse(q);
            ASSERT_LT(std::abs(arc.canonical_residual(local)), 1e-5);
        }
        if (arc.kind == ArcKind::FlatSegment) continue;
        for (int s = 0; s <= 200; ++s) {
            const Point2 q = arc.point_at(s / 200.0);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) best = std::min(best, detail::chord_deviation(pts[k], pts[k + 1], q));
            ASSERT_LT(best, 1e-3 * std::max(w, h));
        }
    }
    EXPECT_EQ(i, 8u);
}

TEST(Svg, Errors) {
    EXPECT_THROW(render_svg(Body2D{}, {}), std::invalid_argument);
    PlotSpec tight;
    tight.view = ViewBox{0.0, 0.0, 1.0, 1.0};
    EXPECT_THROW(render_svg(default_body(), {}, tight), std::invalid_argument);
    PlotSpec wide;
    wide.view = ViewBox{-20.0, -20.0, 20.0, 20.0};
    EXPECT_NO_THROW(render_svg(default_body(), {}, wide));
}
