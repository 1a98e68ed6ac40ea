#include <gtest/gtest.h>

#include <cmath>

#include "bcl/connection.hpp"
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

TEST(CurvatureF, ZeroConnection) {
    const auto g = test::adapted(2, 1, StructureConstants::su2(),
                                 [](const Vec& y) { return Mat(Mat::Identity(3, 3) * (1.0 + y(0) * y(0))); },
                                 test::constant(Mat::Identity(3, 3)), test::constant(Mat::Zero(3, 3)));
    EXPECT_LE(curvature_F(g, vec({0.2, 0.1, -0.3}), DerivEngine{}).max_abs(), 1e-12);
}

TEST(CurvatureF, CurlOfRotationalField) {
    const auto g = test::adapted(2, 1, StructureConstants::zero(1), test::constant(Mat::Identity(3, 3)),
                                 test::constant(Mat::Identity(1, 1)), [](const Vec& y) {
                                     Mat A(1, 3);
                                     A << -y(1), y(0), 0.0;
                                     return A;
                                 });
    const Tensor F = curvature_F(g, vec({0.4, -0.7, 0.2}), DerivEngine{});
    EXPECT_NEAR(F(0, 0, 1), 2.0, 1e-10);
    EXPECT_NEAR(F(0, 1, 0), -2.0, 1e-10);
    EXPECT_NEAR(F(0, 0, 2), 0.0, 1e-10);
}

TEST(CurvatureF, TwistedAntisymmetricAndMatchesIndependentStencil) {
    const AdaptedGeometry& g = twisted().adapted;
    const auto& c = g.c;
    const int m = g.m(), n = g.n_g;
    for (const Vec& y : sample_points(twisted(), 5, 21)) {
        const Tensor F = curvature_F(g, y, DerivEngine{});
        std::vector<Mat> dA;
        for (int s = 0; s < m; ++s) dA.push_back(test::cdiff(g.A.eval, y, s));
        const Mat A = g.A(y);
        for (int mu = 0; mu < n; ++mu)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    EXPECT_LE(std::abs(F(mu, a, b) + F(mu, b, a)), 1e-9);
                    double v = dA[static_cast<std::size_t>(a)](mu, b) - dA[static_cast<std::size_t>(b)](mu, a);
                    for (int s = 0; s < n; ++s)
                        for (int q = 0; q < n; ++q) v += c(mu, s, q) * A(s, a) * A(q, b);
                    EXPECT_NEAR(F(mu, a, b), v, 1e-8);
                }
    }
}

TEST(CovariantDd, ConstantOrbitMetricWithoutConnection) {
    const auto g = test::adapted(2, 0, StructureConstants::su2(), test::constant(Mat::Identity(2, 2)),
                                 test::constant(orbit_metric_sample()), test::constant(Mat::Zero(3, 2)));
    EXPECT_LE(covariant_D_orbit_metric(g, vec({0.1, 0.2}), DerivEngine{}).max_abs(), 1e-12);
}

TEST(CovariantDd, AdInvariantMetricWithAnyConnection) {
    // d proportional to the Killing form of su(2); A arbitrary.
    const auto g = test::adapted(2, 1, StructureConstants::su2(), test::constant(Mat::Identity(3, 3)),
                                 test::constant(Mat::Identity(3, 3) * 2.0), [](const Vec& y) {
                                     Mat A(3, 3);
                                     A << y(0), 0.3, -y(1), 0.2 * y(2), 1.0, 0.5, -0.4, y(0) * y(1), 0.1;
                                     return A;
                                 });
    EXPECT_LE(covariant_D_orbit_metric(g, vec({0.3, -0.6, 0.9}), DerivEngine{}).max_abs(), 1e-12);
}

TEST(CovariantDd, ExponentialScaling) {
    const auto g = test::adapted(2, 0, StructureConstants::su2(), test::constant(Mat::Identity(2, 2)),
                                 [](const Vec& y) { return Mat(std::exp(2.0 * y(0)) * Mat::Identity(3, 3)); },
                                 test::constant(Mat::Zero(3, 2)));
    const Vec y = vec({0.35, -0.2});
    const Tensor Dd = covariant_D_orbit_metric(g, y, DerivEngine{});
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu) {
            EXPECT_NEAR(Dd(0, mu, nu), mu == nu ? 2.0 * std::exp(0.7) : 0.0, 1e-9);
            EXPECT_NEAR(Dd(1, mu, nu), 0.0, 1e-12);
        }
}

TEST(Christoffel, FlatProductVanishes) {
    const auto g = test::adapted(2, 2, StructureConstants::zero(3), test::constant(Mat::Identity(4, 4) * 1.5),
                                 test::constant(Mat::Identity(3, 3)), test::constant(Mat::Zero(3, 4)));
    const Vec y = vec({0.1, 0.2, 0.3, 0.4});
    EXPECT_EQ(christoffel_general(g, y, DerivEngine{}).gamma.max_abs(), 0.0);
    EXPECT_EQ(christoffel_table(g, y, DerivEngine{}).gamma.max_abs(), 0.0);
}

TEST(Christoffel, PureOrbitBlockConstantMetric) {
    const auto c = StructureConstants::su2();
    const Mat d = orbit_metric_sample();
    const Mat di = d.inverse();
    const auto g = test::adapted(1, 0, c, test::constant(Mat::Identity(1, 1)), test::constant(d),
                                 test::constant(Mat::Zero(3, 1)));
    const Vec y = vec({0.0});
    const auto gen = christoffel_general(g, y, DerivEngine{});
    const auto tab = christoffel_table(g, y, DerivEngine{});
    const int o = 1;
    for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
            for (int ga = 0; ga < 3; ++ga) {
                double v = 0.0;
                for (int mu = 0; mu < 3; ++mu)
                    for (int ep = 0; ep < 3; ++ep)
                        v += 0.5 * di(al, mu) *
                             (c(ep, be, ga) * d(ep, mu) - c(ep, mu, ga) * d(ep, be) - c(ep, mu, be) * d(ep, ga));
                EXPECT_NEAR(gen(o + al, o + be, o + ga), v, 1e-13);
                EXPECT_NEAR(tab(o + al, o + be, o + ga), v, 1e-13);
            }
}

TEST(Christoffel, TorsionBalanceAllSectors) {
    const AdaptedGeometry& g = twisted().adapted;
    for (const Vec& y : sample_points(twisted(), 5, 22)) {
        const Tensor cc = structure_functions(g, y, DerivEngine{});
        EXPECT_LE(torsion_balance_residual(christoffel_general(g, y, DerivEngine{}), cc), 1e-9);
        EXPECT_LE(torsion_balance_residual(christoffel_table(g, y, DerivEngine{}), cc), 1e-9);
    }
}

TEST(Christoffel, DiagonalOrbitLogDerivativeTrace) {
    const auto g = test::adapted(2, 0, StructureConstants::su2(), test::constant(Mat::Identity(2, 2)),
                                 [](const Vec& y) {
                                     return Mat(Vec(vec({std::exp(y(0)), 2.0 + y(0) * y(1), 1.0 + y(0) * y(0)}))
                                                    .asDiagonal());
                                 },
                                 test::constant(Mat::Zero(3, 2)));
    const Vec y = vec({0.4, 0.3});
    // 1/2 sum_mu d_1 ln d_mumu = 1/2 (1 + y1/(2 + y0 y1) + 2 y0/(1 + y0^2))
    const double expect = 0.5 * (1.0 + 0.3 / (2.0 + 0.12) + 0.8 / 1.16);
    EXPECT_NEAR(christoffel_table(g, y, DerivEngine{}).orbit_trace()(0), expect, 1e-9);
    EXPECT_NEAR(christoffel_general(g, y, DerivEngine{}).orbit_trace()(0), expect, 1e-9);
}

TEST(Christoffel, TableMatchesGeneralOnTwisted) {
    const AdaptedGeometry& g = twisted().adapted;
    for (const Vec& y : sample_points(twisted(), 10, 23)) {
        const auto r = compare_christoffel(christoffel_table(g, y, DerivEngine{}), christoffel_general(g, y, DerivEngine{}));
        EXPECT_FALSE(r.empty());
        for (const auto& s : r) EXPECT_LE(s.rel, 1e-8) << s.name;
    }
}

TEST(Christoffel, BlockNamesAndShapes) {
    EXPECT_EQ(ChristoffelBlocks::block_name(Block::Orbit, Block::Orbit, Block::Orbit), "Gamma^alpha_betagamma");
    const AdaptedGeometry& g = twisted().adapted;
    const auto cb = christoffel_table(g, twisted().center(), DerivEngine{});
    const Tensor b = cb.block(Block::Base, Block::Vec, Block::Orbit);
    EXPECT_EQ(b.shape(), (std::vector<int>{2, 3, 3}));
}

TEST(BaseLeviCivita, ConstantMetric) {
    const auto g = test::adapted(2, 1, StructureConstants::su2(), test::constant(Mat::Identity(3, 3) * 2.0),
                                 test::constant(Mat::Identity(3, 3)), test::constant(Mat::Zero(3, 3)));
    EXPECT_LE(base_levi_civita(g, vec({0.1, 0.2, 0.3}), DerivEngine{}).max_abs(), 1e-12);
}

TEST(BaseLeviCivita, ConformallyFlatPlane) {
    const auto g = test::adapted(2, 0, StructureConstants::su2(),
                                 [](const Vec& y) { return Mat(std::exp(2.0 * y(0)) * Mat::Identity(2, 2)); },
                                 test::constant(Mat::Identity(3, 3)), test::constant(Mat::Zero(3, 2)));
    const Tensor L = base_levi_civita(g, vec({0.3, -0.5}), DerivEngine{});
    EXPECT_NEAR(L(0, 0, 0), 1.0, 1e-9);
    EXPECT_NEAR(L(0, 1, 1), -1.0, 1e-9);
    EXPECT_NEAR(L(1, 0, 1), 1.0, 1e-9);
    EXPECT_NEAR(L(1, 1, 0), 1.0, 1e-9);
    EXPECT_NEAR(L(1, 1, 1), 0.0, 1e-9);
}

TEST(BaseLeviCivita, HorizontalSectorOfGeneralWithoutConnection) {
    const auto g = test::adapted(
        2, 1, StructureConstants::su2(),
        [](const Vec& y) {
            Mat h(3, 3);
            h << 1.0 + y(0) * y(0), 0.1 * y(1), 0.0, 0.1 * y(1), 2.0 + std::sin(y(2)), 0.2, 0.0, 0.2, 1.5;
            return h;
        },
        [](const Vec& y) { return Mat(orbit_metric_sample() * (1.0 + 0.3 * y(0))); },
        test::constant(Mat::Zero(3, 3)));
    const Vec y = vec({0.2, -0.3, 0.5});
    const Tensor L = base_levi_civita(g, y, DerivEngine{});
    const auto gen = christoffel_general(g, y, DerivEngine{});
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(gen(a, b, c), L(a, b, c), 1e-10);
}
