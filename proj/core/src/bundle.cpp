#include "bcl/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat section_jacobian(const OriginalGeometry& orig, const Vec& x, const DerivEngine& engine) {
    if (orig.section_jac) return orig.section_jac(x);
    return fd_jacobian(engine, orig.section, x);
}

Mat chi_jacobian(const OriginalGeometry& orig, const Vec& Q, const DerivEngine& engine) {
    if (orig.chi_jac) return orig.chi_jac(Q);
    return fd_jacobian(engine, orig.chi, Q);
}

void check_dims(const OriginalGeometry& orig, const Vec& y) {
    if (orig.n_x() < 0) throw ShapeError("n_P smaller than n_g");
    if (y.size() != orig.m()) throw ShapeError("chart point length does not match n_x + n_v");
    if (static_cast<int>(orig.gens.size()) != orig.n_g) throw ShapeError("one generator per group direction required");
}

OrbitMetricValue orbit_from(const Mat& GP, const Mat& KP, const Mat& GV, const Mat& KV) {
    OrbitMetricValue o;
    o.gamma = sym(KP.transpose() * GP * KP);
    o.gamma_prime = sym(KV.transpose() * GV * KV);
    o.d = o.gamma + o.gamma_prime;
    try {
        o.d_inv = invert_spd(o.d).inverse;
    } catch (const SingularMatrixError& e) {
        throw FreeActionError(std::string("orbit metric is not positive definite: ") + e.what());
    }
    return o;
}

}  // namespace

void AdaptedGeometry::check_point(const Vec& y) const {
    if (y.size() != m()) throw ShapeError("chart point length does not match n_x + n_v");
}

Mat OriginalGeometry::K_V(const Vec& f) const {
    Mat k(n_v, n_g);
    for (int a = 0; a < n_g; ++a) k.col(a) = gens[static_cast<std::size_t>(a)] * f;
    return k;
}

BundlePoint evaluate_bundle(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    check_dims(orig, y);
    BundlePoint bp;
    bp.n_x = orig.n_x();
    bp.n_v = orig.n_v;
    bp.n_g = orig.n_g;
    bp.n_P = orig.n_P;
    bp.x = y.head(bp.n_x);
    bp.f = y.tail(bp.n_v);
    bp.Q = orig.section(bp.x);
    bp.GP = orig.G_P(bp.Q);
    bp.GP_inv = invert_spd(bp.GP).inverse;
    bp.GV = orig.G_V;
    bp.GV_inv = invert_spd(bp.GV).inverse;
    bp.KP = orig.K_P(bp.Q);
    bp.KV = orig.K_V(bp.f);
    bp.Qs = section_jacobian(orig, bp.x, engine);
    bp.chiJ = chi_jacobian(orig, bp.Q, engine);

    bp.orbit = orbit_from(bp.GP, bp.KP, bp.GV, bp.KV);
    bp.gamma_inv = invert_spd(bp.orbit.gamma).inverse;
    const Mat& di = bp.orbit.d_inv;
    const Mat& gi = bp.gamma_inv;

    bp.conn.A_x = di * bp.KP.transpose() * bp.GP * bp.Qs;
    bp.conn.A_v = di * bp.KV.transpose() * bp.GV;
    bp.conn.A_gamma = gi * bp.KP.transpose() * bp.GP * bp.Qs;

    auto& H = bp.horiz;
    H.GHt_PP = sym(bp.GP - bp.GP * bp.KP * di * bp.KP.transpose() * bp.GP);
    H.GHt_Pv = -bp.GP * bp.KP * di * bp.KV.transpose() * bp.GV;
    H.GHt_vv = sym(bp.GV - bp.GV * bp.KV * di * bp.KV.transpose() * bp.GV);
    H.GH = sym(bp.GP - bp.GP * bp.KP * gi * bp.KP.transpose() * bp.GP);
    H.h_xx = sym(bp.Qs.transpose() * H.GHt_PP * bp.Qs);
    H.h_xv = bp.Qs.transpose() * H.GHt_Pv;
    H.h_vv = H.GHt_vv;
    const int m = bp.n_x + bp.n_v;
    H.h_tilde.resize(m, m);
    H.h_tilde << H.h_xx, H.h_xv, H.h_xv.transpose(), H.h_vv;
    H.h = sym(bp.Qs.transpose() * H.GH * bp.Qs);
    bp.h_inv = invert_spd(H.h).inverse;

    auto& P = bp.proj;
    P.Phi = bp.chiJ * bp.KP;
    Eigen::FullPivLU<Mat> lu(P.Phi);
    if (bp.n_g > 0) {
        Eigen::JacobiSVD<Mat> svd(P.Phi);
        const auto& s = svd.singularValues();
        if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > 1e12)
            throw GaugeError("Faddeev-Popov matrix is singular: section not transversal to the orbits");
    }
    P.Lambda = bp.n_g > 0 ? Mat(lu.solve(bp.chiJ)) : Mat(0, bp.n_P);
    P.N_PP = Mat::Identity(bp.n_P, bp.n_P) - bp.KP * P.Lambda;
    P.N_vP = -bp.KV * P.Lambda;
    P.P_perp = P.N_PP;
    P.T = bp.h_inv * bp.Qs.transpose() * H.GH * P.P_perp;
    // Horizontal projector of the total space, Pi = 1 - K d^{-1} K^T G.
    P.Pi_PP = Mat::Identity(bp.n_P, bp.n_P) - bp.KP * di * bp.KP.transpose() * bp.GP;
    P.Pi_Pv = -bp.KP * di * bp.KV.transpose() * bp.GV;
    P.Pi_vP = -bp.KV * di * bp.KP.transpose() * bp.GP;
    P.Pi_vv = Mat::Identity(bp.n_v, bp.n_v) - bp.KV * di * bp.KV.transpose() * bp.GV;
    return bp;
}

OrbitMetricValue build_orbit_metric(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    check_dims(orig, y);
    const Vec x = y.head(orig.n_x());
    const Vec f = y.tail(orig.n_v);
    (void)engine;
    const Vec Q = orig.section(x);
    return orbit_from(orig.G_P(Q), orig.K_P(Q), orig.G_V, orig.K_V(f));
}

ConnectionValue build_connection(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    return evaluate_bundle(orig, y, engine).conn;
}

HorizontalMetricValue build_horizontal_metric(const OriginalGeometry& orig, const Vec& y,
                                              const DerivEngine& engine) {
    return evaluate_bundle(orig, y, engine).horiz;
}

Projectors build_projectors(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    return evaluate_bundle(orig, y, engine).proj;
}

AdaptedGeometry compile_adapted(const OriginalGeometry& orig, const DerivEngine& engine) {
    AdaptedGeometry g;
    g.n_x = orig.n_x();
    g.n_v = orig.n_v;
    g.n_g = orig.n_g;
    g.c = orig.c;
    const int m = orig.m(), n = orig.n_g;
    auto o = std::make_shared<OriginalGeometry>(orig);
    g.h_tilde = make_field(m, m, [o, engine](const Vec& y) {
        return evaluate_bundle(*o, y, engine).horiz.h_tilde;
    });
    g.d = make_field(n, n, [o](const Vec& y) { return build_orbit_metric(*o, y).d; });
    g.A = make_field(n, m, [o, engine, m, n](const Vec& y) {
        BundlePoint bp = evaluate_bundle(*o, y, engine);
        Mat a(n, m);
        a << bp.conn.A_x, bp.conn.A_v;
        return a;
    });
    g.h_tilde.sectors = {Sector::Base, Sector::Vector};
    g.d.sectors = {Sector::Orbit, Sector::Orbit};
    g.A.sectors = {Sector::Orbit, Sector::Base};
    return g;
}

Mat coordinate_metric(const Mat& h_tilde, const Mat& d, const Mat& A, const Mat& u_bar) {
    const Eigen::Index m = h_tilde.rows(), n = d.rows();
    Mat G(m + n, m + n);
    G.topLeftCorner(m, m) = h_tilde + A.transpose() * d * A;
    G.topRightCorner(m, n) = A.transpose() * d * u_bar;
    G.bottomLeftCorner(n, m) = G.topRightCorner(m, n).transpose();
    G.bottomRightCorner(n, n) = u_bar.transpose() * d * u_bar;
    return sym(G);
}

BlockMetric assemble_block_metric(const AdaptedGeometry& adapted, const Vec& y) {
    adapted.check_point(y);
    const int m = adapted.m(), n = adapted.n_g;
    const Mat h = adapted.h_tilde(y), d = adapted.d(y), A = adapted.A(y);
    const SpdInverse hi = invert_spd(h), di = invert_spd(d);
    BlockMetric b;
    b.frame = Mat::Zero(m + n, m + n);
    b.frame.topLeftCorner(m, m) = h;
    b.frame.bottomRightCorner(n, n) = d;
    b.frame_inv = Mat::Zero(m + n, m + n);
    b.frame_inv.topLeftCorner(m, m) = hi.inverse;
    b.frame_inv.bottomRightCorner(n, n) = di.inverse;
    b.coord = coordinate_metric(h, d, A, Mat::Identity(n, n));
    b.coord_inv.resize(m + n, m + n);
    b.coord_inv.topLeftCorner(m, m) = hi.inverse;
    b.coord_inv.topRightCorner(m, n) = -hi.inverse * A.transpose();
    b.coord_inv.bottomLeftCorner(n, m) = -A * hi.inverse;
    b.coord_inv.bottomRightCorner(n, n) = di.inverse + A * hi.inverse * A.transpose();
    b.orbit_space_inv = b.coord_inv.topLeftCorner(m, m);
    b.roundtrip = (b.coord * b.coord_inv - Mat::Identity(m + n, m + n)).cwiseAbs().maxCoeff();
    return b;
}

Mat inverse_metric_from_original(const BundlePoint& bp) {
    const int nx = bp.n_x, nv = bp.n_v, n = bp.n_g;
    const Mat& hi = bp.h_inv;
    const Mat& Ag = bp.conn.A_gamma;  // n_g x n_x
    const Mat& L = bp.proj.Lambda;   // n_g x n_P
    const Mat LGL = L * bp.GP_inv * L.transpose();
    Mat out(nx + nv + n, nx + nv + n);
    const Mat xf = hi * Ag.transpose() * bp.KV.transpose();
    const Mat ff = bp.GV_inv + bp.proj.N_vP * bp.GP_inv * bp.proj.N_vP.transpose();
    const Mat xa = -hi * Ag.transpose();
    const Mat fa = -bp.KV * LGL;
    out.block(0, 0, nx, nx) = hi;
    out.block(0, nx, nx, nv) = xf;
    out.block(nx, 0, nv, nx) = xf.transpose();
    out.block(nx, nx, nv, nv) = ff;
    out.block(0, nx + nv, nx, n) = xa;
    out.block(nx + nv, 0, n, nx) = xa.transpose();
    out.block(nx, nx + nv, nv, n) = fa;
    out.block(nx + nv, nx, n, nv) = fa.transpose();
    out.block(nx + nv, nx + nv, n, n) = LGL;
    return out;
}

double det_factorization_check(const OriginalGeometry& orig, const Vec& y, const Mat& u_bar,
                               const DerivEngine& engine) {
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    const int m = orig.m();
    Mat A(orig.n_g, m);
    A << bp.conn.A_x, bp.conn.A_v;
    const Mat G = coordinate_metric(bp.horiz.h_tilde, bp.orbit.d, A, u_bar);
    const double lhs = G.determinant();
    const double ud = u_bar.determinant();
    const double rhs = bp.orbit.d.determinant() * ud * ud * bp.horiz.h_tilde.determinant();
    if (lhs == 0.0) throw SingularMatrixError("total metric determinant vanishes");
    return std::abs(lhs - rhs) / std::abs(lhs);
}

double det_factorization_check(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    return det_factorization_check(orig, y, Mat::Identity(orig.n_g, orig.n_g), engine);
}

GateReport validate_original(const OriginalGeometry& orig, const std::vector<Vec>& points,
                             const DerivEngine& engine, double killing_tol) {
    GateReport r;
    r.min_d_eig = std::numeric_limits<double>::infinity();
    const int nP = orig.n_P, n = orig.n_g;
    for (int a = 0; a < n; ++a) {
        const Mat& e = orig.gens[static_cast<std::size_t>(a)];
        r.v_isometry = std::max(r.v_isometry, (e.transpose() * orig.G_V + orig.G_V * e).cwiseAbs().maxCoeff());
        for (int b = 0; b < n; ++b) {
            // Generators realize [K_a, K_b] = c^g_ab K_g as -(e_a e_b - e_b e_a).
            Mat lhs = -(e * orig.gens[static_cast<std::size_t>(b)] - orig.gens[static_cast<std::size_t>(b)] * e);
            Mat rhs = Mat::Zero(orig.n_v, orig.n_v);
            for (int g = 0; g < n; ++g) rhs += orig.c(g, a, b) * orig.gens[static_cast<std::size_t>(g)];
            r.brackets = std::max(r.brackets, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    for (const Vec& y : points) {
        const Vec x = y.head(orig.n_x());
        const Vec Q = orig.section(x);
        r.section = std::max(r.section, orig.chi(Q).cwiseAbs().maxCoeff());
        const Mat GP = orig.G_P(Q);
        const Mat KP = orig.K_P(Q);
        VecFn gflat = [&orig](const Vec& q) { return flatten(orig.G_P(q)); };
        VecFn kflat = [&orig](const Vec& q) { return flatten(orig.K_P(q)); };
        const Mat dG = fd_jacobian(engine, gflat, Q);  // column C = d_C G (flattened)
        const Mat dK = fd_jacobian(engine, kflat, Q);
        const double scale = std::max(1.0, GP.cwiseAbs().maxCoeff());
        for (int a = 0; a < n; ++a) {
            Mat lie = Mat::Zero(nP, nP);
            for (int C = 0; C < nP; ++C) lie += KP(C, a) * unflatten(dG.col(C), nP, nP);
            Mat dKa(nP, nP);  // dKa(C, B) = d_B K^C_a
            for (int B = 0; B < nP; ++B) dKa.col(B) = unflatten(dK.col(B), nP, n).col(a);
            lie += dKa.transpose() * GP + GP * dKa;
            r.killing = std::max(r.killing, lie.cwiseAbs().maxCoeff() / scale);
            for (int b = 0; b < n; ++b) {
                Vec br = Vec::Zero(nP);
                for (int B = 0; B < nP; ++B) {
                    Mat dKB = unflatten(dK.col(B), nP, n);
                    br += KP(B, a) * dKB.col(b) - KP(B, b) * dKB.col(a);
                }
                Vec rhs = Vec::Zero(nP);
                for (int g = 0; g < n; ++g) rhs += orig.c(g, a, b) * KP.col(g);
                r.brackets = std::max(r.brackets, (br - rhs).cwiseAbs().maxCoeff());
            }
        }
        const Mat chiJ = chi_jacobian(orig, Q, engine);
        const Mat Phi = chiJ * KP;
        if (n > 0) {
            Eigen::JacobiSVD<Mat> svd(Phi);
            const auto& s = svd.singularValues();
            const double cond = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
            r.fp_cond = std::max(r.fp_cond, cond);
        }
        const OrbitMetricValue om = orbit_from(GP, KP, orig.G_V, orig.K_V(y.tail(orig.n_v)));
        if (n > 0) {
            Eigen::SelfAdjointEigenSolver<Mat> eig(om.d, Eigen::EigenvaluesOnly);
            r.min_d_eig = std::min(r.min_d_eig, eig.eigenvalues()(0));
        }
    }
    r.pass = r.killing <= killing_tol && r.v_isometry <= 1e-12 && r.brackets <= killing_tol &&
             r.section <= 1e-10 && r.fp_cond <= 1e12 && (n == 0 || r.min_d_eig > 0.0);
    return r;
}

}  // namespace bcl
