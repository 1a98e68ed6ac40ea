#include "bcl/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

constexpr int kChunk = 1024;

struct ChunkSums {
    Vec s1;
    Mat s2;
};

double sqrt_det_h(const AdaptedGeometry& g, const Vec& y) { return std::sqrt(density_H(g, y)); }

}  // namespace

void SdeParams::validate() const {
    if (!(mu2 > 0.0)) throw ConfigError("mu2 must be positive", "mu2");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive", "kappa");
    if (!(mass > 0.0)) throw ConfigError("mass must be positive", "mass");
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive", "hbar");
}

double density_H(const AdaptedGeometry& g, const Vec& y) {
    g.check_point(y);
    return invert_spd(g.h_tilde(y)).det;
}

Vec drift_coefficients(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    const int nx = orig.n_x(), nv = orig.n_v, n = orig.n_g, m = orig.m();
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    auto sqrtH = [&](const Vec& z) { return std::sqrt(invert_spd(evaluate_bundle(orig, z, engine).horiz.h_tilde).det); };
    const double rH = sqrtH(y);

    // Divergences of sqrt(H) times x-only matrices, over x slots.
    VecFn hx = [&](const Vec& z) {
        const BundlePoint p = evaluate_bundle(orig, z, engine);
        const double s = std::sqrt(invert_spd(p.horiz.h_tilde).det);
        Mat both(nx, nx + n);
        both << p.h_inv, p.h_inv * p.conn.A_gamma.transpose();
        return flatten(s * both);
    };
    Mat divx = Mat::Zero(nx, nx + n);  // row-sum over j of d_j (sqrt H M)^{j .}
    for (int j = 0; j < nx; ++j) divx.row(j) = unflatten(fd_partial(engine, hx, y, j), nx, nx + n).row(j);
    const Vec div_hij = divx.leftCols(nx).colwise().sum().transpose();    // d_j(sqrtH h^{ji})
    const Vec div_hA = divx.rightCols(n).colwise().sum().transpose();     // d_j(sqrtH h^{jm} A^mu_m)

    // f-divergences: d_b(sqrt H K^b_mu) and d_b(sqrt H) and d_b(G^{AB} N^a_A N^b_B).
    VecFn fK = [&](const Vec& z) { return flatten(sqrtH(z) * orig.K_V(z.tail(nv))); };
    VecFn fH = [&](const Vec& z) {
        Vec v(1);
        v(0) = sqrtH(z);
        return v;
    };
    VecFn fN = [&](const Vec& z) {
        const BundlePoint p = evaluate_bundle(orig, z, engine);
        return flatten(Mat(p.proj.N_vP * p.GP_inv * p.proj.N_vP.transpose()));
    };
    Vec div_K = Vec::Zero(n), dH = Vec::Zero(nv), div_N = Vec::Zero(nv);
    for (int b = 0; b < nv; ++b) {
        div_K += unflatten(fd_partial(engine, fK, y, nx + b), nv, n).row(b).transpose();
        dH(b) = fd_partial(engine, fH, y, nx + b)(0);
        div_N += unflatten(fd_partial(engine, fN, y, nx + b), nv, nv).col(b);
    }

    Vec out(m);
    const Mat& Ag = bp.conn.A_gamma;
    out.head(nx) = div_hij / rH + bp.h_inv * Ag.transpose() * div_K / rH;
    const Mat ff = bp.GV_inv + bp.proj.N_vP * bp.GP_inv * bp.proj.N_vP.transpose();
    out.tail(nv) = bp.KV * div_hA / rH + ff * dH / rH + div_N;
    return out;
}

Vec drift_divergence_form(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    const int m = g.m();
    VecFn fn = [&](const Vec& z) {
        const SpdInverse s = invert_spd(g.h_tilde(z));
        return flatten(std::sqrt(s.det) * s.inverse);
    };
    Vec out = Vec::Zero(m);
    for (int b = 0; b < m; ++b) out += unflatten(fd_partial(engine, fn, y, b), m, m).col(b);
    return out / sqrt_det_h(g, y);
}

Mat diffusion_coefficients(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine) {
    const BundlePoint bp = evaluate_bundle(orig, y, engine);
    const int nx = bp.n_x, nv = bp.n_v;
    Mat X = Mat::Zero(nx + nv, nx + nv);
    const Mat Xxx = sqrt_psd(bp.h_inv);
    X.topLeftCorner(nx, nx) = Xxx;
    X.bottomLeftCorner(nv, nx) = bp.KV * bp.conn.A_gamma * Xxx;
    X.bottomRightCorner(nv, nv) = sqrt_psd(bp.KV * bp.gamma_inv * bp.KV.transpose() + bp.GV_inv);
    return X;
}

Mat diffusion_coefficients(const AdaptedGeometry& g, const Vec& y) {
    const int nx = g.n_x, nv = g.n_v;
    const Mat hi = invert_spd(g.h_tilde(y)).inverse;
    Mat X = Mat::Zero(nx + nv, nx + nv);
    const Mat Xxx = sqrt_psd(hi.topLeftCorner(nx, nx));
    X.topLeftCorner(nx, nx) = Xxx;
    if (nv > 0) {
        const Mat Xvx = nx > 0 ? Mat(Xxx.transpose().partialPivLu().solve(hi.topRightCorner(nx, nv)).transpose())
                               : Mat(nv, 0);
        X.bottomLeftCorner(nv, nx) = Xvx;
        Mat rest = hi.bottomRightCorner(nv, nv) - Xvx * Xvx.transpose();
        rest = 0.5 * (rest + rest.transpose());
        X.bottomRightCorner(nv, nv) = sqrt_psd(rest);
    }
    return X;
}

ReducedSdeCoeffs reduced_coefficients(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                      const DerivEngine& engine) {
    ReducedSdeCoeffs c;
    c.b = drift_coefficients(orig, y, engine);
    c.X = diffusion_coefficients(orig, y, engine);
    const SpdInverse s = invert_spd(g.h_tilde(y));
    c.H = s.det;
    c.h_inv = s.inverse;
    return c;
}

ReducedSdeCoeffs reduced_coefficients(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine) {
    ReducedSdeCoeffs c;
    c.b = drift_divergence_form(g, y, engine);
    c.X = diffusion_coefficients(g, y);
    const SpdInverse s = invert_spd(g.h_tilde(y));
    c.H = s.det;
    c.h_inv = s.inverse;
    return c;
}

int worker_count() {
    if (const char* env = std::getenv("BCL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 256));
        throw ConfigError("BCL_THREADS must be a positive integer", "BCL_THREADS");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MomentReport euler_maruyama_check(const ReducedSdeCoeffs& coeffs, const SdeParams& params, double dt, int n_paths,
                                  std::uint64_t seed, double stat_sigma, int threads) {
    params.validate();
    if (n_paths < 2) throw ConfigError("n_paths must be at least 2", "n_paths");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive", "dt");
    if (!(stat_sigma > 0.0)) throw ConfigError("stat_sigma must be positive", "stat_sigma");
    const int k = static_cast<int>(coeffs.b.size());
    if (coeffs.X.rows() != k || coeffs.X.cols() != k) throw ShapeError("diffusion matrix does not match drift length");

    const Vec drift = 0.5 * params.mu2 * params.kappa * dt * coeffs.b;
    const Mat diff = std::sqrt(params.mu2 * params.kappa * dt) * coeffs.X;

    const int n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<ChunkSums> sums(static_cast<std::size_t>(n_chunks));
    auto run_chunk = [&](int ci) {
        ChunkSums cs{Vec::Zero(k), Mat::Zero(k, k)};
        const int lo = ci * kChunk, hi = std::min(n_paths, lo + kChunk);
        Vec z(k);
        for (int p = lo; p < hi; ++p) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(p)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int i = 0; i < k; ++i) z(i) = normal(rng);
            const Vec inc = drift + diff * z;
            cs.s1 += inc;
            cs.s2 += inc * inc.transpose();
        }
        sums[static_cast<std::size_t>(ci)] = std::move(cs);
    };
    if (threads <= 0) threads = worker_count();
    threads = std::max(1, std::min(threads, n_chunks));
    if (threads == 1) {
        for (int ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int ci = t; ci < n_chunks; ci += threads) run_chunk(ci);
            });
        for (auto& th : pool) th.join();
    }
    Vec s1 = Vec::Zero(k);
    Mat s2 = Mat::Zero(k, k);
    for (const auto& cs : sums) {
        s1 += cs.s1;
        s2 += cs.s2;
    }

    MomentReport r;
    r.n_paths = n_paths;
    r.dt = dt;
    r.seed = seed;
    r.sigma = stat_sigma;
    const double n = n_paths;
    r.mean_expected = drift;
    r.mean_sample = s1 / n;
    r.cov_expected = diff * diff.transpose();
    r.cov_sample = (s2 - n * r.mean_sample * r.mean_sample.transpose()) / (n - 1.0);
    const Mat& S = r.cov_expected;
    r.mean_se.resize(k);
    r.cov_se.resize(k, k);
    r.max_mean_z = 0.0;
    r.max_cov_z = 0.0;
    for (int i = 0; i < k; ++i) {
        r.mean_se(i) = std::sqrt(S(i, i) / n);
        const double dm = std::abs(r.mean_sample(i) - r.mean_expected(i));
        r.max_mean_z = std::max(r.max_mean_z, r.mean_se(i) > 0 ? dm / r.mean_se(i) : (dm > 0 ? INFINITY : 0.0));
        for (int j = 0; j < k; ++j) {
            r.cov_se(i, j) = std::sqrt((S(i, i) * S(j, j) + S(i, j) * S(i, j)) / n);
            const double dc = std::abs(r.cov_sample(i, j) - S(i, j));
            r.max_cov_z = std::max(r.max_cov_z, r.cov_se(i, j) > 0 ? dc / r.cov_se(i, j) : (dc > 1e-300 ? INFINITY : 0.0));
        }
    }
    r.pass = r.max_mean_z <= stat_sigma && r.max_cov_z <= stat_sigma;
    return r;
}

}  // namespace bcl
