#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "invis/verify.hpp"
#include "support.hpp"

using namespace invis;
using invis::testing::default_params;
using invis::testing::random_params;

namespace {

const Body2D& default_body() {
    static const Body2D body = build_body2d(default_params());
    return body;
}

double angle_at(Point2 apex, Point2 p, Point2 q) { return angle_between(normalized(p - apex), normalized(q - apex)); }

}  // namespace

TEST(Classify, MissInvisibleDeviated) {
    const Body2D& body = default_body();
    const Tolerances tol;
    EXPECT_EQ(classify_ray(trace2d(body, {{0, 0}, {1, 0}}), tol, 1.0), RayClass::Miss);
    const Vec2 d = polar_unit(std::atan(0.8) - body.params.gamma);
    EXPECT_EQ(classify_ray(trace2d(body, {{0, 0}, d}), tol, 1.0), RayClass::Invisible);
    const Body2D broken = perturbed_body2d(body.params, {PerturbationMode::ScaleAlpha, 0.01});
    const Trajectory2 t = trace2d(broken, {{0, 0}, d});
    EXPECT_EQ(classify_ray(t, tol, 1.0), RayClass::Deviated);
    EXPECT_GT(angle_between(t.exit.direction, t.initial.direction), 1e-3);
}

TEST(Classify, StuckWhenCapReached) {
    const Body2D& body = default_body();
    const Vec2 d = polar_unit(std::atan(0.8) - body.params.gamma);
    EXPECT_EQ(classify_ray(trace2d(body, {{0, 0}, d}, 1), Tolerances{}, 1.0), RayClass::Stuck);
}

TEST(Verify, PlanarHeadlineRun) {
    const auto rep = verify_invisibility(default_body(), Sampling{}, 100000);
    EXPECT_EQ(rep.counts.total(), 100000u);
    EXPECT_EQ(rep.counts.deviated, 0u);
    EXPECT_EQ(rep.counts.stuck, 0u);
    EXPECT_GT(rep.counts.invisible, 1000u);
    EXPECT_EQ(rep.three_bounce, rep.counts.invisible);
    EXPECT_EQ(rep.second_hit_not_flat, 0u);
    EXPECT_LT(rep.max_angle_deviation, 1e-9);
    EXPECT_LT(rep.max_line_offset, 1e-9);
    EXPECT_LT(rep.max_second_hit_error, 1e-9);
    EXPECT_LT(rep.delay_spread(), 1e-9);
    EXPECT_NEAR(rep.delay_min, rep.expected_delay, 1e-9);
    EXPECT_NEAR(rep.expected_delay, 2.0 * (1.5 - 2.0 / 3.0), 1e-15);
    // only 0 and 3 bounces occur
    for (const auto& [bounces, count] : rep.bounce_histogram) EXPECT_TRUE(bounces == 0 || bounces == 3) << bounces;
    EXPECT_TRUE(rep.passed());
}

TEST(Verify, SeededSphereRunIsDeterministic) {
    const Body3D g1 = make_body3d(BodyKind::G1, default_body());
    const Sampling s{SamplingMode::UniformSphere, 42};
    const auto a = verify_invisibility(g1, s, 10000, {}, 1);
    const auto b = verify_invisibility(g1, s, 10000, {}, 4);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.max_angle_deviation, b.max_angle_deviation);
    EXPECT_EQ(a.counts.deviated, 0u);
    EXPECT_EQ(a.counts.stuck, 0u);
    EXPECT_EQ(a.seed, std::optional<std::uint64_t>(42));
    EXPECT_EQ(a.body, "g1");
    const auto c = verify_invisibility(g1, Sampling{SamplingMode::UniformSphere, 43}, 10000);
    EXPECT_NE(a.counts, c.counts);
}

TEST(Verify, SingleSampleAlongAxisMisses) {
    const auto rep = verify_invisibility(default_body(), Sampling{}, 1);
    EXPECT_EQ(rep.counts.miss, 1u);
    EXPECT_EQ(rep.counts.total(), 1u);
    EXPECT_THROW(verify_invisibility(default_body(), Sampling{}, 0), std::invalid_argument);
}

TEST(Verify, G2AndStratifiedRuns) {
    const Body3D g2 = make_body3d(BodyKind::G2, default_body());
    const auto rep = verify_invisibility(g2, Sampling{SamplingMode::Stratified, 5}, 10000);
    EXPECT_EQ(rep.counts.deviated + rep.counts.stuck, 0u);
    EXPECT_GT(rep.counts.invisible, 50u);
    EXPECT_EQ(rep.sampling, "stratified");
    const auto planar = verify_invisibility(default_body(), Sampling{SamplingMode::Stratified, 5}, 10000);
    EXPECT_EQ(planar.counts.deviated, 0u);
}

TEST(Sampling, SphereDirectionsAreUnitAndBalanced) {
    for (const Sampling& s : {Sampling{}, Sampling{SamplingMode::UniformSphere, 7}, Sampling{SamplingMode::Stratified, 7}}) {
        const auto dirs = sample_sphere(s, 20000);
        Vec3 mean{};
        for (const Vec3& d : dirs) {
            ASSERT_TRUE(is_unit(d, 1e-14));
            mean = mean + d;
        }
        mean = mean / 20000.0;
        EXPECT_LT(norm(mean), 0.03) << to_string(s.mode);
    }
}

TEST(Sampling, CircleGridStartsAtZeroAngle) {
    const auto dirs = sample_circle(Sampling{}, 4);
    EXPECT_NEAR(dirs[0].x, 1.0, 1e-15);
    EXPECT_NEAR(dirs[1].y, 1.0, 1e-15);
    EXPECT_NEAR(dirs[2].x, -1.0, 1e-15);
}

TEST(Bisector, ForwardIdentityOnRandomTriangles) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Point2 apex{u(rng), u(rng)}, p{u(rng), u(rng)}, q{u(rng), u(rng)};
        if (std::abs(cross(p - apex, q - apex)) < 1e-3) continue;
        const double a1 = distance(apex, p), a2 = distance(apex, q), base = distance(p, q);
        // foot from the ratio property b1/b2 = a1/a2
        const double b1 = base * a1 / (a1 + a2), b2 = base - b1;
        const Point2 foot = p + (q - p) * (b1 / base);
        const double f = distance(apex, foot);
        const auto r = bisector_relations(a1, a2, b1, b2, f);
        // residuals are relative to a1 a2, the size of the products being differenced; f^2 itself
        // can be tiny for wide apex angles and would only measure cancellation
        worst = std::max(worst, std::abs(r.identity) / (a1 * a2));
        ASSERT_NEAR(r.ratio, 0.0, 1e-12);
        ASSERT_NEAR(r.product / (a1 * a2), 0.0, 1e-12);
        // the foot really bisects the apex angle
        ASSERT_NEAR(angle_at(apex, p, foot), angle_at(apex, foot, q), 1e-9);
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Bisector, ConverseHolds) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Point2 apex{u(rng), u(rng)}, p{u(rng), u(rng)}, q{u(rng), u(rng)};
        if (std::abs(cross(p - apex, q - apex)) < 1e-2) continue;
        ASSERT_LT(converse_bisector_gap(apex, p, q), 1e-9);
    }
}

TEST(Bisector, DegenerateTriangleRejected) {
    EXPECT_THROW(check_bisector_identity(1.0, 1.0, 1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(converse_bisector_gap({0, 0}, {1, 0}, {2, 0}), std::invalid_argument);
}

TEST(AngleEquality, DefaultAndSweep) {
    const auto p = default_params();
    EXPECT_LT(check_angle_equality(p, 0.8), 1e-12);
    double worst = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double k = p.k_min + (p.k_max - p.k_min) * i / 1001.0;
        worst = std::max(worst, check_angle_equality(p, k));
    }
    EXPECT_LT(worst, 1e-11);
    EXPECT_THROW(check_angle_equality(p, 0.5), std::invalid_argument);
    EXPECT_THROW(check_angle_equality(p, 1.2), std::invalid_argument);
}

TEST(AngleEquality, RandomTuples) {
    std::mt19937_64 rng(31);
    for (int n = 0; n < 50; ++n) {
        const auto p = random_params(rng);
        for (int i = 1; i < 20; ++i) {
            const double k = p.k_min + (p.k_max - p.k_min) * i / 20.0;
            ASSERT_LT(check_angle_equality(p, k), 1e-11) << p.kappa << " " << k;
        }
    }
}

TEST(Connectivity, ComponentCounts) {
    const Body2D& body = default_body();
    EXPECT_EQ(connectivity_probe(make_body3d(BodyKind::G1, body), 128).components, 1u);
    EXPECT_EQ(connectivity_probe(make_body3d(BodyKind::G2, body), 128).components, 2u);
    const auto planar = connectivity_probe(body, 128);
    EXPECT_EQ(planar.components, 2u);
    ASSERT_EQ(planar.component_sizes.size(), 2u);
    // the two planar halves are mirror images
    EXPECT_NEAR(static_cast<double>(planar.component_sizes[0]), static_cast<double>(planar.component_sizes[1]),
                0.02 * planar.component_sizes[0]);
}

TEST(Connectivity, RejectsTinyResolution) {
    EXPECT_THROW(connectivity_probe(default_body(), 8), std::invalid_argument);
}

TEST(NegativeControl, EveryModeDeviates) {
    const auto p = default_params();
    for (auto mode : {PerturbationMode::ScaleAlpha, PerturbationMode::ShiftFlatSegment, PerturbationMode::RotateHyperbola}) {
        const auto rep = negative_control(p, {mode, 0.01}, 20000);
        EXPECT_GT(rep.counts.deviated, 0u) << to_string(mode);
        EXPECT_GT(rep.max_angle_deviation, 1e-3) << to_string(mode);
        EXPECT_FALSE(rep.passed());
        EXPECT_NE(rep.perturbation, "none");
    }
}

TEST(NegativeControl, ShiftedEdgeMovesSecondHit) {
    const auto rep = negative_control(default_params(), {PerturbationMode::ShiftFlatSegment, 0.01}, 20000);
    EXPECT_GT(rep.max_second_hit_error, 1e-3);
}

TEST(NegativeControl, ZeroMagnitudeIsTheValidBody) {
    const auto p = default_params();
    const auto valid = verify_invisibility(default_body(), Sampling{}, 20000);
    for (auto mode : {PerturbationMode::ScaleAlpha, PerturbationMode::ShiftFlatSegment, PerturbationMode::RotateHyperbola}) {
        const auto rep = negative_control(p, {mode, 0.0}, 20000);
        EXPECT_EQ(rep.counts, valid.counts) << to_string(mode);
        EXPECT_EQ(rep.perturbation, "none");
        EXPECT_EQ(rep.max_angle_deviation, valid.max_angle_deviation);
    }
}
