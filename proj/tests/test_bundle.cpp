#include <gtest/gtest.h>

#include "bcl/bundle.hpp"
#include "bcl/errors.hpp"
#include "bcl/scenarios.hpp"
#include "support.hpp"

using namespace bcl;
using test::vec;

namespace {

const Scenario& twisted() {
    static const Scenario s = build_scenario("twisted_bundle");
    return s;
}

// Coordinate metric at the identity in (x, f, a), pulled back from
// blockdiag(G_P, G_V) along the section, the vector directions and the Killing fields.
Mat pulled_back_metric(const OriginalGeometry& o, const Vec& y) {
    const int nx = o.n_x(), nv = o.n_v, ng = o.n_g, nP = o.n_P;
    const Vec x = y.head(nx), f = y.tail(nv);
    const Vec Q = o.section(x);
    Mat Qs(nP, nx);
    for (int i = 0; i < nx; ++i) {
        auto sec = [&](const Vec& z) { return Mat(o.section(z)); };
        Qs.col(i) = test::cdiff(sec, x, i);
    }
    Mat KV = Mat::Zero(nv, ng);
    for (int al = 0; al < ng; ++al) KV.col(al) = o.gens[static_cast<std::size_t>(al)] * f;
    Mat E = Mat::Zero(nP + nv, nx + nv + ng);
    E.block(0, 0, nP, nx) = Qs;
    E.block(nP, nx, nv, nv) = Mat::Identity(nv, nv);
    E.block(0, nx + nv, nP, ng) = o.K_P(Q);
    E.block(nP, nx + nv, nv, ng) = KV;
    Mat G = Mat::Zero(nP + nv, nP + nv);
    G.topLeftCorner(nP, nP) = o.G_P(Q);
    G.bottomRightCorner(nv, nv) = o.G_V;
    return E.transpose() * G * E;
}

}  // namespace

TEST(OrbitMetric, MatchesLoopSum) {
    const auto& o = *twisted().orig;
    for (const Vec& y : sample_points(twisted(), 5, 3)) {
        const Vec x = y.head(o.n_x()), f = y.tail(o.n_v);
        const Vec Q = o.section(x);
        const Mat KP = o.K_P(Q), GP = o.G_P(Q);
        Mat d = Mat::Zero(o.n_g, o.n_g);
        for (int a = 0; a < o.n_g; ++a)
            for (int b = 0; b < o.n_g; ++b) {
                for (int A = 0; A < o.n_P; ++A)
                    for (int B = 0; B < o.n_P; ++B) d(a, b) += KP(A, a) * GP(A, B) * KP(B, b);
                for (int i = 0; i < o.n_v; ++i)
                    for (int j = 0; j < o.n_v; ++j)
                        for (int k = 0; k < o.n_v; ++k)
                            for (int l = 0; l < o.n_v; ++l)
                                d(a, b) += o.gens[static_cast<std::size_t>(a)](i, k) * f(k) * o.G_V(i, j) *
                                           o.gens[static_cast<std::size_t>(b)](j, l) * f(l);
            }
        EXPECT_LE((build_orbit_metric(o, y).d - d).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(AdaptedFields, MatchSchurComplementOfPulledBackMetric) {
    const auto& o = *twisted().orig;
    const AdaptedGeometry& g = twisted().adapted;
    const int m = g.m(), n = g.n_g;
    for (const Vec& y : sample_points(twisted(), 6, 11)) {
        const Mat G = pulled_back_metric(o, y);
        const Mat Gaa = G.bottomRightCorner(n, n);
        const Mat Gay = G.bottomLeftCorner(n, m);
        const Mat A = Gaa.ldlt().solve(Gay);
        const Mat h = G.topLeftCorner(m, m) - Gay.transpose() * A;
        EXPECT_LE((g.d(y) - Gaa).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((g.A(y) - A).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((g.h_tilde(y) - h).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(AdaptedFields, TrivialRepresentation) {
    // gens = 0: d is gamma(x) alone, A_v = 0 and h~_ab = G_ab.
    const int nx = 2;
    const auto c = StructureConstants::su2();
    const GroupChart chart(so3_generators(), 3.0);
    Mat GV(2, 2);
    GV << 1.5, 0.2, 0.2, 0.8;
    auto k = [](const Vec& x) {
        Mat m(2, 2);
        m << 1.0 + 0.1 * x(0) * x(0), 0.1 * x(1), 0.1 * x(1), 1.2;
        return m;
    };
    auto gamma = [](const Vec& x) { return Mat(Mat::Identity(3, 3) * (1.0 + 0.2 * x(0))); };
    auto B = [](const Vec& x) {
        Mat b = Mat::Zero(3, 2);
        b(0, 0) = x(1);
        b(2, 1) = 0.3;
        return b;
    };
    const OriginalGeometry o =
        product_bundle(nx, c, chart, k, gamma, B, std::vector<Mat>(3, Mat::Zero(2, 2)), GV);
    const Vec y = vec({0.2, -0.1, 0.5, 0.4});
    const auto om = build_orbit_metric(o, y);
    EXPECT_EQ(om.gamma_prime.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((om.d - gamma(y.head(2))).cwiseAbs().maxCoeff(), 1e-14);
    const auto conn = build_connection(o, y);
    EXPECT_EQ(conn.A_v.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((conn.A_x - conn.A_gamma).cwiseAbs().maxCoeff(), 1e-14);
    const auto hm = build_horizontal_metric(o, y);
    EXPECT_EQ(hm.h_xv.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((hm.h_vv - GV).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AdaptedFields, ScalingGPScalesOrbitMetric) {
    const auto c = StructureConstants::su2();
    const GroupChart chart(so3_generators(), 3.0);
    auto k = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    auto B = [](const Vec& x) { return Mat(Mat::Constant(3, 2, 0.1 * x(0))); };
    const std::vector<Mat> gens(3, Mat::Zero(3, 3));
    const Mat GV = Mat::Identity(3, 3);
    auto gam1 = [](const Vec& x) { return Mat(Mat::Identity(3, 3) * (2.0 + x(1))); };
    auto gam2 = [gam1](const Vec& x) { return Mat(3.0 * gam1(x)); };
    const Vec y = vec({0.1, 0.3, 0.0, 0.2, -0.2});
    const Mat d1 = build_orbit_metric(product_bundle(2, c, chart, k, gam1, B, gens, GV), y).d;
    const Mat d2 = build_orbit_metric(product_bundle(2, c, chart, k, gam2, B, gens, GV), y).d;
    EXPECT_LE((d2 - 3.0 * d1).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(AdaptedFields, KillingOrthogonalToSectionGivesZeroConnection) {
    const auto c = StructureConstants::su2();
    const GroupChart chart(so3_generators(), 3.0);
    auto k = [](const Vec& x) { return Mat(Mat::Identity(2, 2) * (1.0 + x(0) * x(0))); };
    auto gam = [](const Vec&) { return Mat(Mat::Identity(3, 3)); };
    auto B = [](const Vec&) { return Mat(Mat::Zero(3, 2)); };
    const std::vector<Mat> gens(3, Mat::Zero(2, 2));
    const auto o = product_bundle(2, c, chart, k, gam, B, gens, Mat::Identity(2, 2));
    EXPECT_EQ(build_connection(o, vec({0.3, 0.1, 0.2, -0.4})).A_x.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Projectors, TInvertsSectionTangent) {
    const auto& o = *twisted().orig;
    for (const Vec& y : sample_points(twisted(), 5, 4)) {
        const BundlePoint bp = evaluate_bundle(o, y);
        EXPECT_LE((bp.proj.T * bp.Qs - Mat::Identity(o.n_x(), o.n_x())).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Projectors, NIsIdempotent) {
    const auto& o = *twisted().orig;
    for (const Vec& y : sample_points(twisted(), 20, 5)) {
        const Mat N = build_projectors(o, y).N_PP;
        EXPECT_LE((N * N - N).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(BlockMetric, ConstantFieldsInvertExactly) {
    Mat h(2, 2), d(3, 3);
    h << 2.0, 0.1, 0.1, 1.0;
    d = Mat::Identity(3, 3) * 0.5;
    const auto g = test::adapted(1, 1, StructureConstants::su2(), test::constant(h), test::constant(d),
                                 test::constant(Mat::Zero(3, 2)));
    const BlockMetric bm = assemble_block_metric(g, vec({0.0, 0.0}));
    Mat expect = Mat::Zero(5, 5);
    expect.topLeftCorner(2, 2) = h.inverse();
    expect.bottomRightCorner(3, 3) = d.inverse();
    EXPECT_LE((bm.coord_inv - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BlockMetric, TwistedRoundTripAndQuadrant) {
    const AdaptedGeometry& g = twisted().adapted;
    for (const Vec& y : sample_points(twisted(), 10, 6)) {
        const BlockMetric bm = assemble_block_metric(g, y);
        EXPECT_LE(bm.roundtrip, 1e-10);
        EXPECT_LE((bm.coord * bm.coord_inv - Mat::Identity(g.total(), g.total())).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((bm.orbit_space_inv - invert_spd(g.h_tilde(y)).inverse).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BlockMetric, OriginalFormOfInverse) {
    const auto& o = *twisted().orig;
    for (const Vec& y : sample_points(twisted(), 5, 8)) {
        const BlockMetric bm = assemble_block_metric(twisted().adapted, y);
        const Mat inv = inverse_metric_from_original(evaluate_bundle(o, y));
        EXPECT_LE((inv - bm.coord_inv).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(DetFactorization, FlatAndTwisted) {
    const Scenario flat = build_scenario("flat_product");
    EXPECT_LE(det_factorization_check(*flat.orig, flat.center()), 1e-12);
    for (const Vec& y : sample_points(twisted(), 50, 9)) EXPECT_LE(det_factorization_check(*twisted().orig, y), 1e-9);
}

TEST(DetFactorization, WithGroupPoint) {
    const auto& s = twisted();
    const Vec a = vec({0.2, -0.3, 0.1});
    EXPECT_LE(det_factorization_check(*s.orig, s.center(), s.chart->u_bar(a)), 1e-9);
}

TEST(DetFactorization, ScaleInvariantResidual) {
    const auto c = StructureConstants::su2();
    const GroupChart chart(so3_generators(), 3.0);
    auto make = [&](double lam) {
        auto k = [lam](const Vec& x) {
            Mat m(2, 2);
            m << 1.0 + 0.2 * x(0), 0.1, 0.1, 1.3;
            return Mat(lam * m);
        };
        auto gam = [lam](const Vec& x) { return Mat(lam * Mat::Identity(3, 3) * (1.0 + 0.1 * x(1))); };
        auto B = [](const Vec& x) { return Mat(Mat::Constant(3, 2, 0.2 * x(0))); };
        std::vector<Mat> gens;
        for (const Mat& t : so3_generators()) gens.push_back(-t);
        return product_bundle(2, c, chart, k, gam, B, gens, lam * Mat::Identity(3, 3));
    };
    const Vec y = vec({0.1, 0.2, 0.3, -0.2, 0.4});
    const double r1 = det_factorization_check(make(1.0), y);
    const double r2 = det_factorization_check(make(2.5), y);
    EXPECT_LE(r1, 1e-12);
    EXPECT_LE(r2, 1e-12);
}

TEST(Gates, TwistedPasses) {
    const GateReport& r = twisted().gates;
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.killing, 1e-6);
    EXPECT_LE(r.section, 1e-12);
    EXPECT_GT(r.min_d_eig, 0.0);
}

TEST(Gates, NonInvariantMetricFails) {
    OriginalGeometry o = *twisted().orig;
    const auto base = o.G_P;
    // A bump that varies along the group breaks the Killing property of K_P.
    o.G_P = [base](const Vec& Q) {
        Mat G = base(Q);
        G(2, 2) += 0.3 * std::sin(Q(2));
        return G;
    };
    const GateReport r = validate_original(o, sample_points(twisted(), 3, 1));
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.killing, 1e-6);
}
