#include <gtest/gtest.h>

#include <cmath>

#include "bcl/curvature.hpp"
#include "bcl/scenarios.hpp"
#include "support.hpp"

using namespace bcl;
using test::vec;

namespace {

const Scenario& twisted() {
    static const Scenario s = build_scenario("twisted_bundle");
    return s;
}

Mat orbit_metric_sample() {
    Mat d(3, 3);
    d << 1.0, 0.2, 0.0, 0.2, 2.0, -0.3, 0.0, -0.3, 3.0;
    return d;
}

}  // namespace

TEST(GroupSign, CalibratesToPlusOne) { EXPECT_EQ(calibrated_group_sign(), 1); }

TEST(Ricci, FlatProductVanishes) {
    const auto g = test::adapted(2, 1, StructureConstants::zero(3), test::constant(Mat::Identity(3, 3) * 1.5),
                                 test::constant(orbit_metric_sample()), test::constant(Mat::Zero(3, 3)));
    const auto r = ricci_nonholonomic(g, ChristoffelSource::Table, vec({0.1, 0.2, 0.3}), DerivEngine{});
    EXPECT_LE(r.ricci.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(std::abs(r.scalar), 1e-12);
}

TEST(Ricci, PureOrbitTraceIsOrbitCurvature) {
    const auto c = StructureConstants::su2();
    const auto g = test::adapted(1, 0, c, test::constant(Mat::Identity(1, 1)), test::constant(orbit_metric_sample()),
                                 test::constant(Mat::Zero(3, 1)));
    const double expect = orbit_scalar_curvature(c, orbit_metric_sample());
    for (auto src : {ChristoffelSource::Table, ChristoffelSource::General})
        EXPECT_NEAR(ricci_nonholonomic(g, src, vec({0.0}), DerivEngine{}).scalar, expect, 1e-12);
}

TEST(Ricci, ComponentAgreesWithMatrix) {
    const AdaptedGeometry& g = twisted().adapted;
    const Vec y = twisted().center();
    const auto r = ricci_nonholonomic(g, ChristoffelSource::General, y, DerivEngine{});
    EXPECT_NEAR(ricci_component(g, ChristoffelSource::General, y, DerivEngine{}, 0, 6), r.ricci(0, 6), 1e-12);
    EXPECT_NEAR(ricci_component(g, ChristoffelSource::General, y, DerivEngine{}, 3, 3), r.ricci(3, 3), 1e-12);
}

TEST(CoordinateCurvature, RoundSphere) {
    // Round sphere of radius r: textbook scalar 2/r^2, reported here with the opposite sign.
    for (double r : {1.0, 2.0}) {
        MetricFn metric = [r](const Vec& z) {
            Mat g = Mat::Zero(2, 2);
            g(0, 0) = r * r;
            g(1, 1) = r * r * std::sin(z(0)) * std::sin(z(0));
            return g;
        };
        EXPECT_NEAR(coordinate_scalar_curvature(metric, vec({1.0, 0.3}), DerivEngine{}), -2.0 / (r * r), 1e-8);
    }
}

TEST(CoordinateCurvature, FlatPolarChart) {
    MetricFn metric = [](const Vec& z) {
        Mat g = Mat::Identity(2, 2);
        g(1, 1) = z(0) * z(0);
        return g;
    };
    EXPECT_NEAR(coordinate_scalar_curvature(metric, vec({1.3, 0.2}), DerivEngine{}), 0.0, 1e-8);
}

TEST(Decomposition, ConstantOrbitMetricTermsVanish) {
    const auto g = test::adapted(2, 1, StructureConstants::su2(),
                                 [](const Vec& y) { return Mat(Mat::Identity(3, 3) * (1.0 + 0.1 * y(0) * y(1))); },
                                 test::constant(orbit_metric_sample()), test::constant(Mat::Zero(3, 3)));
    const auto b = decomposition_terms(g, vec({0.2, 0.4, -0.1}), DerivEngine{});
    EXPECT_EQ(b.FF, 0.0);
    EXPECT_LE(std::abs(b.DdDd), 1e-20);
    EXPECT_LE(std::abs(b.lap_ln_d), 1e-9);
    EXPECT_LE(std::abs(b.grad_ln_d), 1e-18);
}

TEST(Decomposition, ScaledOrbitLogDeterminant) {
    const Scenario s = build_scenario("scaled_orbit");
    for (const Vec& y : sample_points(s, 5, 2)) {
        const auto b = decomposition_terms(s.adapted, y, DerivEngine{});
        EXPECT_NEAR(b.lap_ln_d, 0.0, 1e-8);
        EXPECT_NEAR(b.grad_ln_d, 9.0, 1e-12);
        EXPECT_NEAR(b.DdDd, 3.0, 1e-12);
    }
}

TEST(Decomposition, FFMatchesLoopWithIndependentStencil) {
    const AdaptedGeometry& g = twisted().adapted;
    const auto& c = g.c;
    const int m = g.m(), n = g.n_g;
    for (const Vec& y : sample_points(twisted(), 3, 31)) {
        const Mat A = g.A(y), d = g.d(y), hi = g.h_tilde(y).inverse();
        std::vector<Mat> dA;
        for (int s = 0; s < m; ++s) dA.push_back(test::cdiff(g.A.eval, y, s));
        Tensor F({n, m, m});
        for (int mu = 0; mu < n; ++mu)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double v = dA[static_cast<std::size_t>(a)](mu, b) - dA[static_cast<std::size_t>(b)](mu, a);
                    for (int s = 0; s < n; ++s)
                        for (int q = 0; q < n; ++q) v += c(mu, s, q) * A(s, a) * A(q, b);
                    F(mu, a, b) = v;
                }
        double ff = 0.0;
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        for (int p = 0; p < m; ++p)
                            for (int q = 0; q < m; ++q) ff += 0.25 * d(mu, nu) * hi(a, p) * hi(b, q) * F(mu, a, b) * F(nu, p, q);
        const auto terms = decomposition_terms(g, y, DerivEngine{});
        EXPECT_NEAR(terms.FF, ff, 1e-8 * std::max(1.0, std::abs(ff)));
        EXPECT_GT(std::abs(ff), 0.1);
    }
}

TEST(Assembly, FlatProductIsOrbitCurvature) {
    const Scenario s = build_scenario("flat_product");
    for (const Vec& y : sample_points(s, 3, 1)) {
        const auto b = assemble_scalar_curvature(s.adapted, y, DerivEngine{});
        EXPECT_NEAR(b.R_G, -1.5, 1e-14);
        EXPECT_NEAR(b.R_total, b.R_G, 1e-12);
    }
}

TEST(Assembly, ScaledOrbitMatchesRicciContraction) {
    const Scenario s = build_scenario("scaled_orbit");
    for (const Vec& y : sample_points(s, 4, 5)) {
        const auto b = assemble_scalar_curvature(s.adapted, y, DerivEngine{});
        const double r = ricci_nonholonomic(s.adapted, ChristoffelSource::General, y, DerivEngine{}).scalar;
        EXPECT_LE(test::rel(b.R_total, r), 1e-6);
        EXPECT_NEAR(b.R_total, b.sum(), 1e-12);
    }
}

TEST(Assembly, TwistedThreeWay) {
    const AdaptedGeometry& g = twisted().adapted;
    for (const Vec& y : sample_points(twisted(), 3, 7)) {
        const double total = assemble_scalar_curvature(g, y, DerivEngine{}).R_total;
        EXPECT_LE(test::rel(ricci_nonholonomic(g, ChristoffelSource::Table, y, DerivEngine{}).scalar, total), 1e-6);
        EXPECT_LE(test::rel(ricci_nonholonomic(g, ChristoffelSource::General, y, DerivEngine{}).scalar, total), 1e-6);
    }
}

TEST(Oracle, AbelianFlatProductIsZero) {
    const Scenario s = build_scenario("flat_product", {{"su2", 0.0}});
    const double r = scalar_curvature_coordinate_oracle(s.adapted, *s.chart, s.center(), vec({0.1, 0.2, 0.3}),
                                                        DerivEngine{});
    EXPECT_NEAR(r, 0.0, 1e-10);
}

TEST(Oracle, TwistedMatchesAssemblyAndIsGroupInvariant) {
    const auto& s = twisted();
    const Vec y = sample_points(s, 2, 9)[1];
    const double total = assemble_scalar_curvature(s.adapted, y, DerivEngine{}).R_total;
    const double r1 = scalar_curvature_coordinate_oracle(s.adapted, *s.chart, y, vec({0.3, -0.2, 0.1}), DerivEngine{});
    const double r2 = scalar_curvature_coordinate_oracle(s.adapted, *s.chart, y, vec({-0.4, 0.1, 0.25}), DerivEngine{});
    EXPECT_LE(test::rel(r1, total), 1e-6);
    EXPECT_LE(test::rel(r1, r2), 1e-6);
}
