#include <gtest/gtest.h>

#include "bcl/checks.hpp"
#include "bcl/errors.hpp"
#include "bcl/scenarios.hpp"
#include "support.hpp"

using namespace bcl;

TEST(Registry, AllNamesBuild) {
    for (const auto& name : scenario_names()) {
        const Scenario s = build_scenario(name);
        EXPECT_EQ(s.name, name);
        EXPECT_EQ(s.adapted.n_x, s.n_x);
        EXPECT_EQ(s.adapted.n_v, s.n_v);
        EXPECT_EQ(s.adapted.n_g, s.n_g);
        EXPECT_EQ(s.box_lo.size(), s.n_x + s.n_v);
        EXPECT_TRUE((s.box_lo.array() < s.box_hi.array()).all());
        EXPECT_LE(s.n_x, 3);
        EXPECT_LE(s.n_v, 3);
        if (s.orig) {
            EXPECT_EQ(s.orig->n_x(), s.n_x);
            EXPECT_EQ(s.orig->n_v, s.n_v);
            EXPECT_TRUE(s.gates.pass) << name;
        }
    }
}

TEST(Registry, UnknownScenario) {
    try {
        build_scenario("klein_bottle");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown scenario"), std::string::npos);
        EXPECT_EQ(e.key(), "scenario");
    }
}

TEST(Registry, BadParametersNameTheKey) {
    try {
        build_scenario("flat_product", {{"lambda", -1.0}});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "lambda");
    }
    try {
        build_scenario("twisted_bundle", {{"lamda", 1.0}});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "lamda");
    }
}

TEST(FlatProduct, ExpectsFlatAndZeroTerms) {
    const Scenario s = build_scenario("flat_product", {{"lambda", 1.0}});
    EXPECT_TRUE(s.expect_flat);
    for (const Vec& y : sample_points(s, 4, 3)) {
        const auto b = assemble_scalar_curvature(s.adapted, y, DerivEngine{});
        for (double v : {b.R_M, b.FF, b.DdDd, b.lap_ln_d, b.grad_ln_d}) EXPECT_LE(std::abs(v), 1e-10);
    }
}

TEST(FlatProduct, AbelianVariantHasNoOrbitCurvature) {
    const Scenario s = build_scenario("flat_product", {{"su2", 0.0}});
    EXPECT_TRUE(s.adapted.c.is_zero());
    EXPECT_EQ(assemble_scalar_curvature(s.adapted, s.center(), DerivEngine{}).R_total, 0.0);
}

TEST(ScaledOrbit, GradientTermIsNineEverywhere) {
    const Scenario s = build_scenario("scaled_orbit", {{"phi1", 1.0}});
    EXPECT_FALSE(s.orig.has_value());
    for (const Vec& y : sample_points(s, 10, 5))
        EXPECT_NEAR(assemble_scalar_curvature(s.adapted, y, DerivEngine{}).grad_ln_d, 9.0, 1e-12);
}

TEST(TwistedBundle, GatesAndCurvature) {
    const Scenario s = build_scenario("twisted_bundle");
    EXPECT_TRUE(s.gates.pass);
    EXPECT_TRUE(s.chart.has_value());
    EXPECT_GT(curvature_F(s.adapted, s.center(), DerivEngine{}).max_abs(), 0.1);
    // d depends on both x and f.
    const Vec y = s.center();
    Vec yx = y, yf = y;
    yx(0) += 0.1;
    yf(3) += 0.1;
    EXPECT_GT((s.adapted.d(yx) - s.adapted.d(y)).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_GT((s.adapted.d(yf) - s.adapted.d(y)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(AbelianLimit, ZeroStructureConstants) {
    const Scenario s = build_scenario("abelian_limit");
    EXPECT_TRUE(s.adapted.c.is_zero());
    EXPECT_TRUE(s.gates.pass);
}

TEST(SamplePoints, SingleIsCenter) {
    const Scenario s = build_scenario("twisted_bundle");
    const auto p = sample_points(s, 1, 99);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], s.center());
}

TEST(SamplePoints, SeededAndContained) {
    for (const auto& name : scenario_names()) {
        const Scenario s = build_scenario(name);
        const auto a = sample_points(s, 50, 7);
        const auto b = sample_points(s, 50, 7);
        const auto c = sample_points(s, 50, 8);
        ASSERT_EQ(a.size(), 50u);
        EXPECT_EQ(a, b);
        EXPECT_NE(a, c);
        for (const Vec& y : a) EXPECT_TRUE(s.contains(y));
    }
}

TEST(SamplePoints, RejectsZeroCount) {
    EXPECT_THROW(sample_points(build_scenario("flat_product"), 0, 1), ConfigError);
}

TEST(Potential, HalfSquaredNorm) {
    const Scenario s = build_scenario("twisted_bundle");
    EXPECT_DOUBLE_EQ(s.potential(test::vec({1.0, 2.0, 0.0, 0.0, 2.0})), 4.5);
}
