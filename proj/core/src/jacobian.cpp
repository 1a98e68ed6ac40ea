#include "bcl/jacobian.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

double log_det_spd(const Mat& d) {
    if (d.rows() == 0) return 0.0;
    Eigen::LLT<Mat> llt(d);
    if (llt.info() != Eigen::Success) throw FreeActionError("orbit metric is not positive definite; ln det d undefined");
    const Mat L = llt.matrixL();
    double s = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

Vec analytic_sigma_grad(const AdaptedGeometry& g, const Vec& z) {
    const Mat d = g.d(z);
    const Mat di = invert_spd(d).inverse;
    const std::vector<Mat> dd = g.d.deriv(z);
    Vec out(z.size());
    for (Eigen::Index s = 0; s < z.size(); ++s) out(s) = (di * dd[static_cast<std::size_t>(s)]).trace();
    return out;
}

// Flattened (alpha + n * beta) symmetric sum of nabla_{K_a} K_b over both sectors.
struct SymKilling {
    std::vector<Vec> P, V;  // indexed by alpha + n * beta
};

SymKilling symmetric_killing(const OriginalGeometry& orig, const Vec& Q, const Vec& f, const DerivEngine& engine) {
    const int n = orig.n_g;
    std::vector<KillingDerivative> kd(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            kd[static_cast<std::size_t>(a + n * b)] = covariant_derivative_killing(orig, Q, f, a, b, engine);
    SymKilling s;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            const auto& ab = kd[static_cast<std::size_t>(a + n * b)];
            const auto& ba = kd[static_cast<std::size_t>(b + n * a)];
            s.P.push_back(ab.P + ba.P);
            s.V.push_back(ab.V + ba.V);
        }
    return s;
}

double scaled(double diff, double scale) { return diff / std::max(1.0, scale); }

}  // namespace

SigmaField sigma_field(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine, bool hessian) {
    g.check_point(y);
    const int m = g.m();
    SigmaField s;
    s.sigma = log_det_spd(g.d(y));
    if (engine.mode == DerivMode::AnalyticIfAvailable && g.d.has_analytic()) {
        VecFn grad = [&g](const Vec& z) { return analytic_sigma_grad(g, z); };
        s.grad = grad(y);
        if (hessian) {
            const Mat hs = fd_jacobian(engine.outer(), grad, y);
            s.hess = 0.5 * (hs + hs.transpose());
        }
        return s;
    }
    VecFn fn = [&g](const Vec& z) {
        Vec v(1);
        v(0) = log_det_spd(g.d(z));
        return v;
    };
    s.grad.resize(m);
    for (int a = 0; a < m; ++a) s.grad(a) = fd_partial(engine, fn, y, a)(0);
    if (hessian) {
        s.hess.resize(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) s.hess(a, b) = s.hess(b, a) = fd_second(engine, fn, y, a, b)(0);
    }
    return s;
}

LnDetTerms ln_det_terms(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    const int m = g.m();
    const Mat h = g.h_tilde(y);
    const Mat hi = invert_spd(h).inverse;
    const std::vector<Mat> dh = gradient(engine, g.h_tilde, y);
    const SigmaField sg = sigma_field(g, y, engine);
    // Contracted Levi-Civita term h^{ab} G^c_{ab} s_c.
    double lc = 0.0;
    for (int c = 0; c < m; ++c) {
        double gc = 0.0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double v = 0.0;
                for (int e = 0; e < m; ++e)
                    v += hi(c, e) * (dh[static_cast<std::size_t>(a)](b, e) + dh[static_cast<std::size_t>(b)](a, e) -
                                     dh[static_cast<std::size_t>(e)](a, b));
                gc += hi(a, b) * 0.5 * v;
            }
        lc += gc * sg.grad(c);
    }
    LnDetTerms t;
    t.lap = (hi.cwiseProduct(sg.hess)).sum() - lc;
    t.grad = 0.25 * sg.grad.dot(hi * sg.grad);
    return t;
}

double jacobian_direct(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    const LnDetTerms t = ln_det_terms(g, y, engine);
    return t.lap + t.grad;
}

QuadraticFormCheck quadratic_form_written_out(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                              const DerivEngine& engine) {
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    const SigmaField sg = sigma_field(g, y, engine, false);
    const int nx = bp.n_x, nv = bp.n_v;
    const Vec sx = sg.grad.head(nx), sf = sg.grad.tail(nv);
    const Mat& hi = bp.h_inv;
    const Mat& Ag = bp.conn.A_gamma;
    const Mat& K = bp.KV;
    QuadraticFormCheck q;
    const Mat ff = K * (bp.gamma_inv + Ag * hi * Ag.transpose()) * K.transpose() + bp.GV_inv;
    q.written_out = sx.dot(hi * sx) + 2.0 * sx.dot(hi * Ag.transpose() * K.transpose() * sf) + sf.dot(ff * sf);
    const Mat hti = invert_spd(bp.horiz.h_tilde).inverse;
    q.block_inverse = sg.grad.dot(hti * sg.grad);
    return q;
}

double jacobian_geometric(const CurvatureBreakdown& b, double R_P) { return R_P - b.R_M - b.R_G - b.FF - b.DdDd; }

double jacobian_geometric(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    const CurvatureBreakdown b = decomposition_terms(g, y, engine);
    const double R_P = ricci_nonholonomic(g, ChristoffelSource::General, y, engine).scalar;
    return jacobian_geometric(b, R_P);
}

KillingDerivative covariant_derivative_killing(const OriginalGeometry& orig, const Vec& Q, const Vec& f, int alpha,
                                               int beta, const DerivEngine& engine) {
    const int nP = orig.n_P, n = orig.n_g;
    if (alpha < 0 || beta < 0 || alpha >= n || beta >= n) throw ShapeError("Killing index out of range");
    if (Q.size() != nP || f.size() != orig.n_v) throw ShapeError("point does not match (n_P, n_v)");
    const Mat K = orig.K_P(Q);
    const Mat GP = orig.G_P(Q);
    const Mat Gi = invert_spd(GP).inverse;
    VecFn kflat = [&orig](const Vec& q) { return flatten(orig.K_P(q)); };
    VecFn gflat = [&orig](const Vec& q) { return flatten(orig.G_P(q)); };
    const Mat dK = fd_jacobian(engine, kflat, Q);
    const Mat dG = fd_jacobian(engine, gflat, Q);
    std::vector<Mat> dGs;
    for (int c = 0; c < nP; ++c) dGs.push_back(unflatten(dG.col(c), nP, nP));

    KillingDerivative out;
    out.P = Vec::Zero(nP);
    for (int b = 0; b < nP; ++b) out.P += K(b, alpha) * unflatten(dK.col(b), nP, n).col(beta);
    // Levi-Civita of G_P contracted with K_alpha, K_beta.
    Vec low = Vec::Zero(nP);
    for (int e = 0; e < nP; ++e)
        for (int b = 0; b < nP; ++b)
            for (int d = 0; d < nP; ++d)
                low(e) += 0.5 * K(b, alpha) * K(d, beta) *
                          (dGs[static_cast<std::size_t>(b)](d, e) + dGs[static_cast<std::size_t>(d)](b, e) -
                           dGs[static_cast<std::size_t>(e)](b, d));
    out.P += Gi * low;
    // Flat connection on V: directional derivative of the linear field e_beta f along e_alpha f.
    out.V = orig.gens[static_cast<std::size_t>(beta)] * (orig.gens[static_cast<std::size_t>(alpha)] * f);
    return out;
}

double IdentityResiduals::max() const { return std::max({plain_P, plain_V, adapted_Q, adapted_f}); }

IdentityResiduals appendixC_identities_check(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                             const DerivEngine& engine) {
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    const int n = bp.n_g, nx = bp.n_x;
    const SymKilling sk = symmetric_killing(orig, bp.Q, bp.f, engine);

    VecFn gam = [&orig](const Vec& q) {
        const Mat K = orig.K_P(q);
        return flatten(K.transpose() * orig.G_P(q) * K);
    };
    VecFn gamv = [&orig](const Vec& f) {
        const Mat K = orig.K_V(f);
        return flatten(K.transpose() * orig.G_V * K);
    };
    const Mat dgam = fd_jacobian(engine, gam, bp.Q);   // row alpha + n beta, column C
    const Mat dgamv = fd_jacobian(engine, gamv, bp.f);  // column b
    const std::vector<Mat> dd = gradient(engine, g.d, y);
    const Mat& d = bp.orbit.d;
    const Mat& L = bp.proj.Lambda;
    const Mat W = bp.horiz.GH * bp.Qs * bp.h_inv;  // G^H_{CD} Q*^D_m h^{mi}

    IdentityResiduals r;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            const int k = a + n * b;
            const Vec& SP = sk.P[static_cast<std::size_t>(k)];
            const Vec& SV = sk.V[static_cast<std::size_t>(k)];
            const double sP = SP.cwiseAbs().maxCoeff(), sV = SV.size() ? SV.cwiseAbs().maxCoeff() : 0.0;

            const Vec lhsP = -bp.GP_inv * dgam.row(k).transpose();
            r.plain_P = std::max(r.plain_P, scaled((lhsP - SP).cwiseAbs().maxCoeff(), sP));
            if (bp.n_v > 0) {
                const Vec lhsV = -bp.GV_inv * dgamv.row(k).transpose();
                r.plain_V = std::max(r.plain_V, scaled((lhsV - SV).cwiseAbs().maxCoeff(), sV));
            }

            Vec dx(nx), df(bp.n_v);
            for (int i = 0; i < nx; ++i) dx(i) = dd[static_cast<std::size_t>(i)](a, b);
            for (int i = 0; i < bp.n_v; ++i) df(i) = dd[static_cast<std::size_t>(nx + i)](a, b);
            Vec cterm(n);
            for (int e = 0; e < n; ++e) {
                double v = 0.0;
                for (int p = 0; p < n; ++p) v += orig.c(p, e, a) * d(p, b) + orig.c(p, e, b) * d(p, a);
                cterm(e) = v;
            }
            const Vec inner = W * dx - L.transpose() * (bp.KV.transpose() * df) + L.transpose() * cterm;
            const Vec lhsQ = 0.5 * bp.GP_inv * inner;
            r.adapted_Q = std::max(r.adapted_Q, scaled((lhsQ + 0.5 * SP).cwiseAbs().maxCoeff(), sP));
            if (bp.n_v > 0) {
                const Vec lhsF = 0.5 * bp.GV_inv * df;
                r.adapted_f = std::max(r.adapted_f, scaled((lhsF + 0.5 * SV).cwiseAbs().maxCoeff(), sV));
            }
        }
    return r;
}

double SecondFundamentalForm::asymmetry() const {
    double m = 0.0;
    for (int b = 0; b < j.dim(0); ++b)
        for (int a = 0; a < j.dim(1); ++a)
            for (int c = 0; c < j.dim(2); ++c) m = std::max(m, std::abs(j(b, a, c) - j(b, c, a)));
    return m;
}

SecondFundamentalForm second_fundamental_form(const FramePoint& fp) {
    SecondFundamentalForm s;
    s.j = Tensor({fp.m, fp.n_g, fp.n_g}, 0.0);
    for (int B = 0; B < fp.m; ++B)
        for (int a = 0; a < fp.n_g; ++a)
            for (int b = 0; b < fp.n_g; ++b) {
                double v = 0.0;
                for (int A = 0; A < fp.m; ++A) v += fp.h_inv(A, B) * fp.Dd(A, a, b);
                s.j(B, a, b) = -0.5 * v;
            }
    return s;
}

SecondFundamentalForm second_fundamental_form(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return second_fundamental_form(evaluate_frame(g, y, engine));
}

double JProjections::max_residual() const { return *std::max_element(residual.begin(), residual.end()); }

JProjections j_projections(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                           const DerivEngine& engine) {
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    const FramePoint fp = evaluate_frame(g, y, engine);
    const int nx = bp.n_x, nv = bp.n_v, n = bp.n_g;
    const SymKilling sk = symmetric_killing(orig, bp.Q, bp.f, engine);
    const auto& H = bp.horiz;
    const Mat& hti = fp.h_inv;
    const Mat hti_xx = hti.topLeftCorner(nx, nx), hti_xv = hti.topRightCorner(nx, nv);
    const Mat hti_vx = hti.bottomLeftCorner(nv, nx), hti_vv = hti.bottomRightCorner(nv, nv);
    const Mat W = H.GH * bp.Qs * bp.h_inv;
    const Mat& Nv = bp.proj.N_vP;

    // Linear maps from (S^M, S^c) to the raw inner products of each projection.
    const Mat X1P = bp.Qs.transpose() * H.GHt_PP, X1V = bp.Qs.transpose() * H.GHt_Pv;
    const Mat X2P = (W * H.h_xx + Nv.transpose() * H.h_xv.transpose()).transpose(), X2V = H.h_xv;
    const Mat X3P = (W * H.h_xv + Nv.transpose() * H.h_vv).transpose(), X3V = H.h_vv.transpose();
    const Mat X4P = H.GHt_Pv.transpose(), X4V = H.GHt_vv.transpose();

    JProjections out;
    const int dims[4] = {nx, nv, nx, nv};
    for (int t = 0; t < 4; ++t) {
        out.raw[static_cast<std::size_t>(t)] = Tensor({dims[t], n, n}, 0.0);
        out.closed[static_cast<std::size_t>(t)] = Tensor({dims[t], n, n}, 0.0);
    }
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            const int k = a + n * b;
            const Vec SP = 0.5 * sk.P[static_cast<std::size_t>(k)];
            const Vec SV = 0.5 * sk.V[static_cast<std::size_t>(k)];
            Vec Dx(nx), Dv(nv);
            for (int i = 0; i < nx; ++i) Dx(i) = fp.Dd(i, a, b);
            for (int i = 0; i < nv; ++i) Dv(i) = fp.Dd(nx + i, a, b);
            const Vec raw[4] = {hti_xx.transpose() * (X1P * SP + X1V * SV),
                                hti_xv.transpose() * (X2P * SP + X2V * SV),
                                hti_vx.transpose() * (X3P * SP + X3V * SV),
                                hti_vv.transpose() * (X4P * SP + X4V * SV)};
            const Vec closed[4] = {-0.5 * hti_xx.transpose() * Dx, -0.5 * hti_xv.transpose() * Dx,
                                   -0.5 * hti_vx.transpose() * Dv, -0.5 * hti_vv.transpose() * Dv};
            for (int t = 0; t < 4; ++t)
                for (int i = 0; i < dims[t]; ++i) {
                    out.raw[static_cast<std::size_t>(t)](i, a, b) = raw[t](i);
                    out.closed[static_cast<std::size_t>(t)](i, a, b) = closed[t](i);
                }
        }
    for (int t = 0; t < 4; ++t) {
        const auto& c = out.closed[static_cast<std::size_t>(t)];
        out.residual[static_cast<std::size_t>(t)] =
            c.size() ? scaled(max_abs_diff(out.raw[static_cast<std::size_t>(t)], c), c.max_abs()) : 0.0;
    }
    return out;
}

double projector_identity_residual(const BundlePoint& bp) {
    const auto& P = bp.proj;
    const double a = (P.Pi_PP * bp.KP + P.Pi_Pv * bp.KV).cwiseAbs().maxCoeff();
    const double b = bp.n_v > 0 ? (P.Pi_vP * bp.KP + P.Pi_vv * bp.KV).cwiseAbs().maxCoeff() : 0.0;
    return std::max(a, b);
}

double j_norm_squared(const FramePoint& fp) {
    const SecondFundamentalForm s = second_fundamental_form(fp);
    const int m = fp.m, n = fp.n_g;
    double total = 0.0;
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B) {
            const double hab = fp.h(A, B);
            if (hab == 0.0) continue;
            Mat jA(n, n), jB(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    jA(a, b) = s.j(A, a, b);
                    jB(a, b) = s.j(B, a, b);
                }
            // j_A(al, be) j_B(mu, nu) d^{al mu} d^{be nu}
            total += hab * (fp.d_inv * jA * fp.d_inv * jB.transpose()).trace();
        }
    return total;
}

double j_norm_squared(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    return j_norm_squared(evaluate_frame(g, y, engine));
}

HamiltonianTerms hamiltonian_terms(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine,
                                   const HamiltonianParams& params, double potential) {
    if (!(params.hbar > 0.0) || !(params.mass > 0.0) || !(params.kappa > 0.0))
        throw ConfigError("hbar, mass and kappa must be positive", "hamiltonian");
    const CurvatureBreakdown b = assemble_scalar_curvature(g, y, engine);
    const double R_P = ricci_nonholonomic(g, ChristoffelSource::General, y, engine).scalar;
    const double jn = j_norm_squared(g, y, engine);
    HamiltonianTerms t;
    t.bracket = R_P - b.R_M - b.R_G - b.FF - jn;
    const double pref = params.hbar * params.hbar / (8.0 * params.mass);
    t.geometric_potential = pref * t.bracket;
    t.generator_term = -(params.hbar * params.kappa / (8.0 * params.mass)) * (b.lap_ln_d + b.grad_ln_d);
    t.potential = potential;
    t.total = t.geometric_potential + potential;
    return t;
}

}  // namespace bcl
