#include "bcl/connection.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/curvature.hpp"
#include "bcl/errors.hpp"

namespace bcl {

namespace {

struct Range {
    int lo, hi;
};

Range range_of(Block b, int n_x, int n_v, int n_g) {
    switch (b) {
        case Block::Base: return {0, n_x};
        case Block::Vec: return {n_x, n_x + n_v};
        case Block::Orbit: return {n_x + n_v, n_x + n_v + n_g};
    }
    return {0, 0};
}

Tensor frame_metric(const FramePoint& fp) {
    Tensor G({fp.N, fp.N}, 0.0);
    for (int i = 0; i < fp.m; ++i)
        for (int j = 0; j < fp.m; ++j) G(i, j) = fp.h(i, j);
    for (int a = 0; a < fp.n_g; ++a)
        for (int b = 0; b < fp.n_g; ++b) G(fp.m + a, fp.m + b) = fp.d(a, b);
    return G;
}

Mat frame_inverse(const FramePoint& fp) {
    Mat gi = Mat::Zero(fp.N, fp.N);
    gi.topLeftCorner(fp.m, fp.m) = fp.h_inv;
    gi.bottomRightCorner(fp.n_g, fp.n_g) = fp.d_inv;
    return gi;
}

}  // namespace

FramePoint evaluate_frame(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    g.check_point(y);
    FramePoint fp;
    fp.n_x = g.n_x;
    fp.n_v = g.n_v;
    fp.n_g = g.n_g;
    fp.m = g.m();
    fp.N = g.total();
    fp.y = y;
    fp.h = g.h_tilde(y);
    fp.d = g.d(y);
    fp.A = g.A(y);
    fp.h_inv = invert_spd(fp.h).inverse;
    try {
        fp.d_inv = invert_spd(fp.d).inverse;
    } catch (const SingularMatrixError& e) {
        throw FreeActionError(std::string("orbit metric is not positive definite: ") + e.what());
    }
    fp.dh = gradient(engine, g.h_tilde, y);
    fp.dd = gradient(engine, g.d, y);
    fp.dA = gradient(engine, g.A, y);

    const int m = fp.m, n = fp.n_g;
    const StructureConstants& c = g.c;
    fp.F = Tensor({n, m, m}, 0.0);
    for (int mu = 0; mu < n; ++mu)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double v = fp.dA[static_cast<std::size_t>(a)](mu, b) - fp.dA[static_cast<std::size_t>(b)](mu, a);
                for (int s = 0; s < n; ++s)
                    for (int q = 0; q < n; ++q) v += c(mu, s, q) * fp.A(s, a) * fp.A(q, b);
                fp.F(mu, a, b) = v;
            }
    fp.Dd = Tensor({m, n, n}, 0.0);
    for (int a = 0; a < m; ++a)
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu) {
                double v = fp.dd[static_cast<std::size_t>(a)](mu, nu);
                for (int s = 0; s < n; ++s)
                    for (int k = 0; k < n; ++k)
                        v -= fp.A(s, a) * (c(k, s, mu) * fp.d(k, nu) + c(k, s, nu) * fp.d(mu, k));
                fp.Dd(a, mu, nu) = v;
            }
    return fp;
}

Tensor curvature_F(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return evaluate_frame(g, y, engine).F;
}

Tensor covariant_D_orbit_metric(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return evaluate_frame(g, y, engine).Dd;
}

Tensor structure_functions(const FramePoint& fp, const StructureConstants& c) {
    const int N = fp.N, m = fp.m, n = fp.n_g;
    Tensor cc({N, N, N}, 0.0);
    for (int g = 0; g < n; ++g) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) cc(m + g, a, b) = -fp.F(g, a, b);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) cc(m + g, m + a, m + b) = c(g, a, b);
    }
    return cc;
}

Tensor structure_functions(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return structure_functions(evaluate_frame(g, y, engine), g.c);
}

Tensor frame_group_derivative(const Tensor& t, const std::vector<Variance>& sig, const StructureConstants& c,
                              int gamma, int sign) {
    return group_direction_derivative(t, sig, c, gamma, sign);
}

Tensor ChristoffelBlocks::block(Block up, Block lo1, Block lo2) const {
    const Range r0 = range_of(up, n_x, n_v, n_g), r1 = range_of(lo1, n_x, n_v, n_g),
                r2 = range_of(lo2, n_x, n_v, n_g);
    Tensor out({r0.hi - r0.lo, r1.hi - r1.lo, r2.hi - r2.lo}, 0.0);
    for (int a = r0.lo; a < r0.hi; ++a)
        for (int b = r1.lo; b < r1.hi; ++b)
            for (int c = r2.lo; c < r2.hi; ++c) out(a - r0.lo, b - r1.lo, c - r2.lo) = gamma(a, b, c);
    return out;
}

Vec ChristoffelBlocks::orbit_trace() const {
    Vec t = Vec::Zero(m());
    for (int a = 0; a < m(); ++a)
        for (int g = m(); g < N(); ++g) t(a) += gamma(g, g, a);
    return t;
}

Vec ChristoffelBlocks::orbit_orbit_trace() const {
    Vec t = Vec::Zero(n_g);
    for (int g = 0; g < n_g; ++g)
        for (int a = m(); a < N(); ++a) t(g) += gamma(a, a, m() + g);
    return t;
}

std::string ChristoffelBlocks::block_name(Block up, Block lo1, Block lo2) {
    auto s = [](Block b, int slot) -> std::string {
        if (b == Block::Base) return std::string(1, "ijk"[slot]);
        if (b == Block::Vec) return std::string(1, "abc"[slot]);
        return std::string(slot == 0 ? "alpha" : (slot == 1 ? "beta" : "gamma"));
    };
    return "Gamma^" + s(up, 0) + "_" + s(lo1, 1) + s(lo2, 2);
}

Tensor base_levi_civita(const FramePoint& fp) {
    const int m = fp.m;
    Tensor out({m, m, m}, 0.0);
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double v = 0.0;
                for (int e = 0; e < m; ++e)
                    v += fp.h_inv(c, e) * (fp.dh[static_cast<std::size_t>(a)](b, e) +
                                           fp.dh[static_cast<std::size_t>(b)](a, e) -
                                           fp.dh[static_cast<std::size_t>(e)](a, b));
                out(c, a, b) = 0.5 * v;
            }
    return out;
}

Tensor base_levi_civita(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return base_levi_civita(evaluate_frame(g, y, engine));
}

ChristoffelBlocks christoffel_general(const FramePoint& fp, const StructureConstants& c, int sign) {
    if (sign == 0) sign = calibrated_group_sign();
    const int N = fp.N, m = fp.m, n = fp.n_g;
    const Tensor G = frame_metric(fp);
    const Mat Gi = frame_inverse(fp);
    const Tensor cc = structure_functions(fp, c);

    std::vector<Tensor> LG;
    for (int mu = 0; mu < n; ++mu)
        LG.push_back(frame_group_derivative(G, {Variance::Lower, Variance::Lower}, c, mu, sign));
    // dG[B](C, D) = hat-derivative along frame vector B of G_CD.
    std::vector<Tensor> dG(static_cast<std::size_t>(N), Tensor({N, N}, 0.0));
    for (int b = 0; b < m; ++b) {
        Tensor& t = dG[static_cast<std::size_t>(b)];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) t(i, j) = fp.dh[static_cast<std::size_t>(b)](i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t(m + i, m + j) = fp.dd[static_cast<std::size_t>(b)](i, j);
        for (int mu = 0; mu < n; ++mu) {
            const double a = fp.A(mu, b);
            if (a == 0.0) continue;
            Tensor l = LG[static_cast<std::size_t>(mu)];
            l *= a;
            t -= l;
        }
    }
    for (int mu = 0; mu < n; ++mu) dG[static_cast<std::size_t>(m + mu)] = LG[static_cast<std::size_t>(mu)];

    ChristoffelBlocks out;
    out.n_x = fp.n_x;
    out.n_v = fp.n_v;
    out.n_g = n;
    out.gamma = Tensor({N, N, N}, 0.0);
    // lowered(D, B, C) = 1/2 (dG_B G_CD + dG_C G_BD - dG_D G_BC) - 1/2 (CC^E_BD G_CE + CC^E_CD G_BE)
    Tensor lowered({N, N, N}, 0.0);
    for (int d = 0; d < N; ++d)
        for (int b = 0; b < N; ++b)
            for (int cI = 0; cI < N; ++cI) {
                double v = 0.5 * (dG[static_cast<std::size_t>(b)](cI, d) + dG[static_cast<std::size_t>(cI)](b, d) -
                                  dG[static_cast<std::size_t>(d)](b, cI));
                double w = 0.0;
                for (int e = 0; e < N; ++e) w += cc(e, b, d) * G(cI, e) + cc(e, cI, d) * G(b, e);
                lowered(d, b, cI) = v - 0.5 * w;
            }
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int cI = 0; cI < N; ++cI) {
                double v = 0.0;
                for (int d = 0; d < N; ++d) v += Gi(a, d) * lowered(d, b, cI);
                out.gamma(a, b, cI) = v + 0.5 * cc(a, b, cI);
            }
    return out;
}

ChristoffelBlocks christoffel_general(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine, int sign) {
    return christoffel_general(evaluate_frame(g, y, engine), g.c, sign);
}

ChristoffelBlocks christoffel_table(const FramePoint& fp, const StructureConstants& c) {
    const int N = fp.N, m = fp.m, n = fp.n_g;
    ChristoffelBlocks out;
    out.n_x = fp.n_x;
    out.n_v = fp.n_v;
    out.n_g = n;
    out.gamma = Tensor({N, N, N}, 0.0);
    Tensor& G = out.gamma;

    const Tensor lc = base_levi_civita(fp);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cI = 0; cI < m; ++cI) G(a, b, cI) = lc(a, b, cI);

    // Gamma^{A'}_{B' al} = Gamma^{A'}_{al B'} = 1/2 h^{A'D'} d_{al be} F^be_{B'D'}
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int al = 0; al < n; ++al) {
                double v = 0.0;
                for (int dI = 0; dI < m; ++dI)
                    for (int be = 0; be < n; ++be) v += fp.h_inv(a, dI) * fp.d(al, be) * fp.F(be, b, dI);
                G(a, b, m + al) = 0.5 * v;
                G(a, m + al, b) = 0.5 * v;
            }
    // Gamma^{A'}_{al be} = -1/2 h^{A'D'} D_{D'} d_{al be}
    for (int a = 0; a < m; ++a)
        for (int al = 0; al < n; ++al)
            for (int be = 0; be < n; ++be) {
                double v = 0.0;
                for (int dI = 0; dI < m; ++dI) v += fp.h_inv(a, dI) * fp.Dd(dI, al, be);
                G(a, m + al, m + be) = -0.5 * v;
            }
    // Gamma^al_{B'C'} = -1/2 F^al_{B'C'}
    for (int al = 0; al < n; ++al)
        for (int b = 0; b < m; ++b)
            for (int cI = 0; cI < m; ++cI) G(m + al, b, cI) = -0.5 * fp.F(al, b, cI);
    // Gamma^al_{be ga} = 1/2 d^{al mu} (c^e_{be ga} d_{e mu} - c^e_{mu ga} d_{e be} - c^e_{mu be} d_{e ga})
    for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
            for (int ga = 0; ga < n; ++ga) {
                double v = 0.0;
                for (int mu = 0; mu < n; ++mu) {
                    double w = 0.0;
                    for (int e = 0; e < n; ++e)
                        w += c(e, be, ga) * fp.d(e, mu) - c(e, mu, ga) * fp.d(e, be) - c(e, mu, be) * fp.d(e, ga);
                    v += fp.d_inv(al, mu) * w;
                }
                G(m + al, m + be, m + ga) = 0.5 * v;
            }
    // Gamma^al_{be K'} = Gamma^al_{K' be} = 1/2 d^{al ga} D_{K'} d_{be ga}
    for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
            for (int k = 0; k < m; ++k) {
                double v = 0.0;
                for (int ga = 0; ga < n; ++ga) v += fp.d_inv(al, ga) * fp.Dd(k, be, ga);
                G(m + al, m + be, k) = 0.5 * v;
                G(m + al, k, m + be) = 0.5 * v;
            }
    return out;
}

ChristoffelBlocks christoffel_table(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return christoffel_table(evaluate_frame(g, y, engine), g.c);
}

std::vector<SectorResidual> compare_christoffel(const ChristoffelBlocks& a, const ChristoffelBlocks& b) {
    if (a.gamma.shape() != b.gamma.shape()) throw ShapeError("Christoffel arrays differ in shape");
    const double scale = std::max(a.gamma.max_abs(), b.gamma.max_abs());
    std::vector<SectorResidual> out;
    const Block all[3] = {Block::Base, Block::Vec, Block::Orbit};
    for (Block u : all)
        for (Block l1 : all)
            for (Block l2 : all) {
                const Tensor ba = a.block(u, l1, l2), bb = b.block(u, l1, l2);
                if (ba.size() == 0) continue;
                SectorResidual r;
                r.name = ChristoffelBlocks::block_name(u, l1, l2);
                r.abs = max_abs_diff(ba, bb);
                r.rel = scale > 0.0 ? r.abs / scale : r.abs;
                out.push_back(r);
            }
    return out;
}

double max_relative(const std::vector<SectorResidual>& r) {
    double m = 0.0;
    for (const auto& s : r) m = std::max(m, s.rel);
    return m;
}

double torsion_balance_residual(const ChristoffelBlocks& g, const Tensor& cc) {
    const int N = g.N();
    double m = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                m = std::max(m, std::abs(g.gamma(a, b, c) - g.gamma(a, c, b) - cc(a, b, c)));
    return m;
}

}  // namespace bcl
