#pragma once

// Command-line front end. Lives in a header so tests can drive run_cli() in-process.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "invis/billiard.hpp"
#include "invis/construction.hpp"
#include "invis/io_export.hpp"
#include "invis/verify.hpp"

namespace invis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;

inline constexpr const char* kOutputDirEnv = "INVIS_OUTPUT_DIR";

struct RunConfig {
    double c = 1.0;
    double kappa = 1.5;
    double k1 = 0.7;
    double k2 = 0.9;
    std::string body = "planar";
    std::size_t n = 100000;
    std::optional<std::uint64_t> seed;
    std::string sampling = "grid";
    Tolerances tol;
    int max_bounces = kDefaultMaxBounces;
    unsigned threads = 0;
    std::string out;
    std::string perturb;
    std::optional<double> k;
    std::optional<double> angle;
    std::vector<double> dir;
    std::string svg;
    std::size_t segments = 64;
    std::string format = "stl";
    double chord_tol = 1e-3;
    std::size_t fan = 7;

    std::vector<std::pair<std::string, std::string>> echo() const {
        std::vector<std::pair<std::string, std::string>> e{
            {"c", fmt::format("{}", c)},
            {"kappa", fmt::format("{}", kappa)},
            {"k1", fmt::format("{}", k1)},
            {"k2", fmt::format("{}", k2)},
            {"body", body},
            {"n", std::to_string(n)},
            {"sampling", sampling},
            {"seed", seed ? std::to_string(*seed) : std::string("none")},
            {"tol_eps", fmt::format("{}", tol.intersection_eps)},
            {"tol_angle", fmt::format("{}", tol.angle)},
            {"tol_offset", fmt::format("{}", tol.offset)},
            {"tol_band", fmt::format("{}", tol.boundary_band)},
            {"max_bounces", std::to_string(max_bounces)},
            {"perturb", perturb.empty() ? std::string("none") : perturb},
        };
        return e;
    }
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::filesystem::path output_path(const std::string& explicit_path, const std::string& default_name) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return std::filesystem::path(dir) / default_name;
    return default_name;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw UsageError("failed writing " + path.string());
}

inline Perturbation parse_perturbation(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--perturb expects mode=value (alpha=1.01, shift=0.01, rotate=0.01)");
    const std::string mode = spec.substr(0, eq);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(spec.substr(eq + 1), &used);
        if (used != spec.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw UsageError("--perturb value is not a number: " + spec);
    }
    // alpha takes a scale factor; shift (units of c) and rotate (radians) take the magnitude directly
    if (mode == "alpha") return {PerturbationMode::ScaleAlpha, value - 1.0};
    if (mode == "shift") return {PerturbationMode::ShiftFlatSegment, value};
    if (mode == "rotate") return {PerturbationMode::RotateHyperbola, value};
    throw UsageError("unknown perturbation mode '" + mode + "'");
}

inline SamplingMode parse_sampling(const std::string& s) {
    if (s == "grid") return SamplingMode::GridAngles;
    if (s == "sphere") return SamplingMode::UniformSphere;
    if (s == "stratified") return SamplingMode::Stratified;
    throw UsageError("unknown sampling '" + s + "'");
}

inline Body2D planar_body(const RunConfig& cfg) { return build_body2d(derive_params(cfg.c, cfg.kappa, cfg.k1, cfg.k2)); }

inline Body3D solid_body(const RunConfig& cfg) {
    return make_body3d(cfg.body == "g2" ? BodyKind::G2 : BodyKind::G1, planar_body(cfg));
}

// ---------------------------------------------------------------------------------------------

inline int cmd_params(const RunConfig& cfg, std::ostream& out) {
    const ConstructionParams p = derive_params(cfg.c, cfg.kappa, cfg.k1, cfg.k2);
    const Point2 cpt = intersection_point_C(p);
    auto row = [&](const char* name, double v) { out << fmt::format("{:<8} {:>20.12g}\n", name, v); };
    out << "parameter                value\n";
    row("c", p.c);
    row("kappa", p.kappa);
    row("a", p.a);
    row("b", p.b);
    row("alpha", p.alpha);
    row("beta", p.beta);
    row("k1", p.k1);
    row("k2", p.k2);
    row("k_min", p.k_min);
    row("k_max", p.k_max);
    row("t", p.t);
    row("gamma", p.gamma);
    row("C.x", cpt.x);
    row("C.y", cpt.y);
    row("delay", 2.0 * (p.a - p.alpha));
    out << "valid: yes (k_min < k1 < k2 < k_max, 1 < kappa < 2)\n";
    return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    InvisibilityReport rep;
    if (!cfg.perturb.empty()) {
        if (cfg.body != "planar") throw UsageError("--perturb applies to the planar body only");
        const Perturbation pert = parse_perturbation(cfg.perturb);
        rep = negative_control(derive_params(cfg.c, cfg.kappa, cfg.k1, cfg.k2), pert, cfg.n, cfg.tol, cfg.threads);
    } else {
        const Sampling sampling{parse_sampling(cfg.sampling), cfg.seed};
        rep = cfg.body == "planar" ? verify_invisibility(planar_body(cfg), sampling, cfg.n, cfg.tol, cfg.threads, cfg.max_bounces)
                                   : verify_invisibility(solid_body(cfg), sampling, cfg.n, cfg.tol, cfg.threads, cfg.max_bounces);
    }
    rep.config = cfg.echo();
    const auto path = output_path(cfg.out, "report.json");
    write_file(path, write_report(rep));
    out << fmt::format("invisible: {}, miss: {}, deviated: {}, stuck: {}, grazing: {}\n", rep.counts.invisible,
                       rep.counts.miss, rep.counts.deviated, rep.counts.stuck, rep.counts.grazing);
    out << fmt::format("max deviation: {:.3e} rad, max exit offset: {:.3e}, report: {}\n", rep.max_angle_deviation,
                       rep.max_line_offset, path.string());
    return rep.passed() ? kExitOk : kExitFailed;
}

inline int cmd_trace(const RunConfig& cfg, std::ostream& out) {
    const Body2D body = planar_body(cfg);
    const ConstructionParams& p = body.params;
    double theta = 0.0;
    if (cfg.k && cfg.angle) throw UsageError("give either --k or --angle, not both");
    if (cfg.k) theta = std::atan(*cfg.k) - p.gamma;
    else if (cfg.angle) theta = *cfg.angle;
    else if (cfg.dir.empty()) throw UsageError("trace needs --k, --angle or --dir");

    auto print_hits = [&](const auto& traj, std::span<const BoundaryArc> arcs) {
        if (traj.hits.empty()) {
            out << "no intersection\n";
            return;
        }
        out << "#  piece        copy     point                                     |p|\n";
        for (std::size_t i = 0; i < traj.hits.size(); ++i) {
            const auto& h = traj.hits[i];
            std::string coords;
            if constexpr (std::is_same_v<std::decay_t<decltype(h.point)>, Vec3>)
                coords = fmt::format("({:.9f}, {:.9f}, {:.9f})", h.point.x, h.point.y, h.point.z);
            else
                coords = fmt::format("({:.9f}, {:.9f})", h.point.x, h.point.y);
            out << fmt::format("{}  {:<11}  {:<7}  {:<40}  {:.12f}{}\n", i + 1, to_string(h.role),
                               arcs[h.arc_index].mirrored_copy ? "mirror" : "primary", coords,
                               norm(h.point), h.grazing ? "  grazing" : "");
        }
        if (traj.hits.size() >= 2)
            out << fmt::format("second hit distance from O: {:.12f} (2c = {:.12f})\n", norm(traj.hits[1].point), 2.0 * p.c);
        out << fmt::format("class: {}\n", to_string(classify_ray(traj, cfg.tol, p.c)));
    };

    if (cfg.body == "planar") {
        if (!cfg.dir.empty()) {
            if (cfg.dir.size() != 2) throw UsageError("--dir for the planar body takes two components");
            theta = std::atan2(cfg.dir[1], cfg.dir[0]);
        }
        const Trajectory2 traj = trace2d(body, Ray2{{0.0, 0.0}, polar_unit(theta)}, cfg.max_bounces, cfg.tol);
        print_hits(traj, body.arcs);
        if (!cfg.svg.empty()) {
            const std::vector<Trajectory2> rays{traj};
            const auto path = output_path(cfg.svg, "trace.svg");
            write_file(path, render_svg(body, rays));
            out << "svg: " << path.string() << "\n";
        }
        return kExitOk;
    }
    const Body3D solid = solid_body(cfg);
    Vec3 d;
    if (!cfg.dir.empty()) {
        if (cfg.dir.size() != 3) throw UsageError("--dir for a solid takes three components");
        d = normalized(Vec3{cfg.dir[0], cfg.dir[1], cfg.dir[2]});
    } else {
        // the inclination is taken in the meridian plane through the +Y (G1) or +X (G2) direction
        d = solid.kind == BodyKind::G1 ? Vec3{std::cos(theta), std::sin(theta), 0.0} : Vec3{std::cos(theta), 0.0, std::sin(theta)};
    }
    print_hits(trace3d(solid, d, cfg.max_bounces, cfg.tol), solid.meridian);
    if (!cfg.svg.empty()) out << "svg output is only available for the planar body\n";
    return kExitOk;
}

inline int cmd_mesh(const RunConfig& cfg, bool body_given, std::ostream& out) {
    RunConfig local = cfg;
    if (local.body == "planar") {
        if (body_given) throw UsageError("mesh needs a solid: --body g1 or --body g2");
        local.body = "g1";
    }
    if (local.format != "stl" && local.format != "obj") throw UsageError("--format must be stl or obj");
    const Body3D solid = solid_body(local);
    const TriangleMesh mesh = revolve_mesh(solid, local.segments, local.chord_tol);
    const MeshTopology topo = mesh_topology(mesh);
    const auto path = output_path(local.out, fmt::format("body_{}.{}", local.body, local.format));
    write_file(path, local.format == "stl" ? write_stl(mesh) : write_obj(mesh));
    out << fmt::format("{}: vertices {} edges {} faces {} euler {} components {} watertight {}\n", local.body,
                       topo.vertices, topo.edges, topo.faces, topo.euler(), topo.components,
                       topo.watertight() ? "yes" : "no");
    out << "written: " << path.string() << "\n";
    return kExitOk;
}

inline int cmd_plot(const RunConfig& cfg, std::ostream& out) {
    const Body2D body = planar_body(cfg);
    const ConstructionParams& p = body.params;
    std::vector<Trajectory2> rays;
    for (std::size_t i = 0; i < cfg.fan; ++i) {
        const double k = p.k1 + (p.k2 - p.k1) * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.fan);
        rays.push_back(trace2d(body, Ray2{{0.0, 0.0}, polar_unit(std::atan(k) - p.gamma)}, cfg.max_bounces, cfg.tol));
    }
    const auto path = output_path(cfg.out, "body.svg");
    write_file(path, render_svg(body, rays));
    out << fmt::format("plot: {} arcs, {} rays -> {}\n", body.arcs.size(), rays.size(), path.string());
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Mirror body invisible from one point: parameters, tracing, verification, export", "invis"};
    app.set_config("--config", "", "Flat key = value config file (TOML/INI syntax); flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    RunConfig cfg;
    std::string sampling_choice = cfg.sampling;
    app.add_option("--c", cfg.c, "Scale: half the focal distance")->capture_default_str();
    app.add_option("--kappa", cfg.kappa, "Eccentricity parameter a/c, 1 < kappa < 2")->capture_default_str();
    app.add_option("--k1", cfg.k1, "Inclination of the first generating ray")->capture_default_str();
    app.add_option("--k2", cfg.k2, "Inclination of the second generating ray")->capture_default_str();
    auto* body_opt = app.add_option("--body", cfg.body, "planar | g1 | g2")
                         ->check(CLI::IsMember({"planar", "g1", "g2"}))
                         ->capture_default_str();
    app.add_option("--n", cfg.n, "Number of sampled directions")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for pseudo-random sampling");
    app.add_option("--sampling", sampling_choice, "grid | sphere | stratified")
        ->check(CLI::IsMember({"grid", "sphere", "stratified"}))
        ->capture_default_str();
    app.add_option("--tol-eps", cfg.tol.intersection_eps, "Minimum advance after a reflection (relative to c)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol-angle", cfg.tol.angle, "Exit direction tolerance (rad)")->check(CLI::PositiveNumber);
    app.add_option("--tol-offset", cfg.tol.offset, "Exit line offset tolerance (relative to c)")->check(CLI::PositiveNumber);
    app.add_option("--tol-band", cfg.tol.boundary_band, "Membership boundary band (relative to c)")->check(CLI::PositiveNumber);
    app.add_option("--max-bounces", cfg.max_bounces, "Reflection cap before a ray counts as stuck")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads for verification (0 = all cores)");
    app.add_option("--out", cfg.out, "Output file (default name inside $INVIS_OUTPUT_DIR or the working directory)");
    app.add_option("--perturb", cfg.perturb, "Negative control: alpha=<factor> | shift=<c units> | rotate=<rad>");
    app.add_option("--k", cfg.k, "Trace: inclination of the ray in the construction frame");
    app.add_option("--angle", cfg.angle, "Trace: polar angle of the ray in body coordinates (rad)");
    app.add_option("--dir", cfg.dir, "Trace: explicit direction components")->delimiter(',');
    app.add_option("--svg", cfg.svg, "Trace: also write an SVG of the trajectory");
    app.add_option("--segments", cfg.segments, "Mesh: azimuthal segments")->capture_default_str();
    app.add_option("--format", cfg.format, "Mesh: stl | obj")->check(CLI::IsMember({"stl", "obj"}))->capture_default_str();
    app.add_option("--chord-tol", cfg.chord_tol, "Mesh: profile chord tolerance (relative to c)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--fan", cfg.fan, "Plot: number of sample rays inside the cone")->capture_default_str();

    auto* params = app.add_subcommand("params", "Print all derived parameters and the validity verdict");
    auto* verify = app.add_subcommand("verify", "Trace many directions from O and write a report");
    auto* trace = app.add_subcommand("trace", "Trace one ray from O and list its reflections");
    auto* mesh = app.add_subcommand("mesh", "Export G1/G2 as a triangle mesh");
    auto* plot = app.add_subcommand("plot", "Render the planar body and sample rays as SVG");
    for (auto* sub : {params, verify, trace, mesh, plot}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitInvalid;
    }
    cfg.sampling = sampling_choice;

    try {
        cfg.tol.validate();
        derive_params(cfg.c, cfg.kappa, cfg.k1, cfg.k2);
        if (params->parsed()) return cmd_params(cfg, out);
        if (verify->parsed()) return cmd_verify(cfg, out);
        if (trace->parsed()) return cmd_trace(cfg, out);
        if (mesh->parsed()) return cmd_mesh(cfg, body_opt->count() > 0, out);
        if (plot->parsed()) return cmd_plot(cfg, out);
    } catch (const ConstructionError& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "output error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace invis::cli
