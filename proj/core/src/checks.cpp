#include "bcl/checks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "bcl/errors.hpp"
#include "bcl/jacobian.hpp"

namespace bcl {

namespace {

double scaled_max(const Mat& diff, const Mat& ref) {
    const double s = ref.size() ? ref.cwiseAbs().maxCoeff() : 0.0;
    return (diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0) / std::max(1.0, s);
}

Mat u_bar_for(const Scenario& s, std::uint64_t seed, int index) {
    if (!s.chart) return Mat::Identity(s.n_g, s.n_g);
    return s.chart->u_bar(oracle_group_point(s.n_g, seed, index, 0));
}

void christoffel_residuals(const Scenario& s, const Vec& y, const DerivEngine& engine, const Tolerances& tol,
                           std::vector<Residual>& out) {
    const FramePoint fp = evaluate_frame(s.adapted, y, engine);
    const ChristoffelBlocks table = christoffel_table(fp, s.adapted.c);
    const ChristoffelBlocks general = christoffel_general(fp, s.adapted.c);
    out.push_back({"table_vs_general", max_relative(compare_christoffel(table, general)), tol.christoffel});
    const double scale = std::max(1.0, general.gamma.max_abs());
    out.push_back({"torsion_balance", torsion_balance_residual(general, structure_functions(fp, s.adapted.c)) / scale,
                   tol.christoffel});
}

void curvature_residuals(const Scenario& s, const Vec& y, int index, const DerivEngine& engine,
                         const Tolerances& tol, const CheckOptions& opt, std::vector<Residual>& out) {
    const AdaptedGeometry& g = s.adapted;
    const double Rt = ricci_nonholonomic(g, ChristoffelSource::Table, y, engine).scalar;
    const double Rg = ricci_nonholonomic(g, ChristoffelSource::General, y, engine).scalar;
    const CurvatureBreakdown b = assemble_scalar_curvature(g, y, engine);
    out.push_back({"table_vs_general", rel_diff(Rt, Rg), tol.identity_rel});
    out.push_back({"table_vs_assembled", rel_diff(Rt, b.R_total), tol.identity_rel});
    out.push_back({"general_vs_assembled", rel_diff(Rg, b.R_total), tol.identity_rel});
    if (s.expect_flat) {
        const double m = std::max({std::abs(b.R_M), std::abs(b.FF), std::abs(b.DdDd), std::abs(b.lap_ln_d),
                                   std::abs(b.grad_ln_d), std::abs(b.R_total - b.R_G)});
        out.push_back({"flat_terms", m, tol.flat_abs});
    }
    if (s.chart && index < opt.oracle_points) {
        const double o1 =
            scalar_curvature_coordinate_oracle(g, *s.chart, y, oracle_group_point(s.n_g, opt.seed, index, 0), engine);
        const double o2 =
            scalar_curvature_coordinate_oracle(g, *s.chart, y, oracle_group_point(s.n_g, opt.seed, index, 1), engine);
        out.push_back({"oracle_vs_assembled", rel_diff(o1, b.R_total), tol.oracle_rel});
        out.push_back({"oracle_orbit_invariance", rel_diff(o1, o2), tol.oracle_rel});
    }
}

void jacobian_residuals(const Scenario& s, const Vec& y, const DerivEngine& engine, const Tolerances& tol,
                        std::vector<Residual>& out) {
    const AdaptedGeometry& g = s.adapted;
    const CurvatureBreakdown b = assemble_scalar_curvature(g, y, engine);
    const double R_P = ricci_nonholonomic(g, ChristoffelSource::General, y, engine).scalar;
    const double Jd = b.lap_ln_d + b.grad_ln_d;
    const double Jg = jacobian_geometric(b, R_P);
    out.push_back({"direct_vs_geometric", rel_diff(Jd, Jg), tol.identity_rel});
    if (s.expect_flat) out.push_back({"flat_jacobian", std::max(std::abs(Jd), std::abs(Jg)), tol.flat_abs});
    if (s.orig) {
        const QuadraticFormCheck q = quadratic_form_written_out(*s.orig, g, y, engine);
        out.push_back({"quadratic_form", rel_diff(q.written_out, q.block_inverse), tol.quadratic});
    }
}

void secondform_residuals(const Scenario& s, const Vec& y, const DerivEngine& engine, const Tolerances& tol,
                          std::vector<Residual>& out) {
    const FramePoint fp = evaluate_frame(s.adapted, y, engine);
    out.push_back({"jnorm_vs_DdDd", rel_diff(j_norm_squared(fp), dd_term(fp)), tol.jnorm});
    out.push_back({"symmetry", second_fundamental_form(fp).asymmetry(), tol.jnorm});
    if (s.orig) {
        const JProjections jp = j_projections(*s.orig, s.adapted, y, engine);
        for (int t = 0; t < 4; ++t)
            out.push_back({"j" + std::to_string(t + 1) + "_raw_vs_closed", jp.residual[static_cast<std::size_t>(t)],
                           tol.projection});
        out.push_back({"projector_identity", projector_identity_residual(evaluate_bundle(*s.orig, y, engine)),
                       tol.projector});
    }
}

void appendixc_residuals(const Scenario& s, const Vec& y, const DerivEngine& engine, const Tolerances& tol,
                         std::vector<Residual>& out) {
    const IdentityResiduals r = appendixC_identities_check(*s.orig, s.adapted, y, engine);
    out.push_back({"plain_P", r.plain_P, tol.identities});
    out.push_back({"plain_V", r.plain_V, tol.identities});
    out.push_back({"ident_Q_ast", r.adapted_Q, tol.identities});
    out.push_back({"ident_f_tild", r.adapted_f, tol.identities});
}

void detfact_residuals(const Scenario& s, const Vec& y, int index, const Tolerances& tol, const CheckOptions& opt,
                       std::vector<Residual>& out) {
    const AdaptedGeometry& g = s.adapted;
    const BlockMetric bm = assemble_block_metric(g, y);
    out.push_back({"block_inverse_roundtrip", bm.roundtrip, tol.roundtrip});
    const Mat ub = u_bar_for(s, opt.seed, index);
    const Mat h = g.h_tilde(y), d = g.d(y), A = g.A(y);
    const Mat G = coordinate_metric(h, d, A, ub);
    const double det_u = ub.determinant();
    const double lhs = G.determinant(), rhs = d.determinant() * h.determinant() * det_u * det_u;
    out.push_back({"det_factorization", std::abs(lhs - rhs) / std::abs(lhs), tol.detfact});
    const double H = density_H(g, y);
    out.push_back({"H_vs_det_ratio", rel_diff(H, bm.coord.determinant() / d.determinant()), tol.detfact});
    if (s.orig) {
        out.push_back({"det_factorization_original", det_factorization_check(*s.orig, y, ub), tol.detfact});
        const Mat inv = inverse_metric_from_original(evaluate_bundle(*s.orig, y));
        out.push_back({"inverse_original_vs_block", scaled_max(inv - bm.coord_inv, bm.coord_inv), tol.detfact});
    }
}

void sde_residuals(const Scenario& s, const Vec& y, const DerivEngine& engine, const Tolerances& tol,
                   std::vector<Residual>& out) {
    const AdaptedGeometry& g = s.adapted;
    const Mat hi = invert_spd(g.h_tilde(y)).inverse;
    const Mat Xa = diffusion_coefficients(g, y);
    out.push_back({"diffusion_adapted", scaled_max(Xa * Xa.transpose() - hi, hi), tol.diffusion});
    if (s.orig) {
        const Mat Xo = diffusion_coefficients(*s.orig, y, engine);
        out.push_back({"diffusion_original", scaled_max(Xo * Xo.transpose() - hi, hi), tol.diffusion});
        const Vec b = drift_coefficients(*s.orig, y, engine);
        const Vec bd = drift_divergence_form(g, y, engine);
        out.push_back({"drift_vs_divergence", scaled_max(b - bd, bd), tol.drift});
    }
}

}  // namespace

const std::vector<CheckKind>& all_checks() {
    static const std::vector<CheckKind> k{CheckKind::Christoffel, CheckKind::Curvature, CheckKind::Jacobian,
                                          CheckKind::SecondForm,  CheckKind::AppendixC, CheckKind::DetFact,
                                          CheckKind::Sde};
    return k;
}

std::string check_name(CheckKind k) {
    switch (k) {
        case CheckKind::Christoffel: return "christoffel";
        case CheckKind::Curvature: return "curvature";
        case CheckKind::Jacobian: return "jacobian";
        case CheckKind::SecondForm: return "secondform";
        case CheckKind::AppendixC: return "appendixC";
        case CheckKind::DetFact: return "detfact";
        case CheckKind::Sde: return "sde";
    }
    return "";
}

std::optional<CheckKind> parse_check(const std::string& name) {
    for (CheckKind k : all_checks())
        if (check_name(k) == name) return k;
    return std::nullopt;
}

bool PointResult::ok() const {
    if (!error.empty()) return false;
    return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.ok(); });
}

std::vector<CheckReport::Summary> CheckReport::summarize() const {
    std::vector<Summary> out;
    for (const auto& p : points)
        for (const auto& r : p.residuals) {
            auto it = std::find_if(out.begin(), out.end(), [&](const Summary& s) { return s.name == r.name; });
            if (it == out.end()) {
                out.push_back({r.name, 0.0, 0.0, r.tol, 0});
                it = out.end() - 1;
            }
            it->max = std::max(it->max, r.value);
            it->mean += r.value;
            it->count += 1;
        }
    for (auto& s : out) s.mean /= std::max(1, s.count);
    return out;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Vec oracle_group_point(int n_g, std::uint64_t seed, int index, int which) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(which), 0x6f72u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Vec a(n_g);
    for (int i = 0; i < n_g; ++i) a(i) = u(rng);
    return a;
}

std::vector<Residual> check_point(CheckKind k, const Scenario& s, const Vec& y, int index, const DerivEngine& engine,
                                  const Tolerances& tol, const CheckOptions& opt) {
    std::vector<Residual> out;
    switch (k) {
        case CheckKind::Christoffel: christoffel_residuals(s, y, engine, tol, out); break;
        case CheckKind::Curvature: curvature_residuals(s, y, index, engine, tol, opt, out); break;
        case CheckKind::Jacobian: jacobian_residuals(s, y, engine, tol, out); break;
        case CheckKind::SecondForm: secondform_residuals(s, y, engine, tol, out); break;
        case CheckKind::AppendixC:
            if (!s.orig) throw ScenarioError("identity check needs original geometry");
            appendixc_residuals(s, y, engine, tol, out);
            break;
        case CheckKind::DetFact: detfact_residuals(s, y, index, tol, opt, out); break;
        case CheckKind::Sde: sde_residuals(s, y, engine, tol, out); break;
    }
    return out;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = worker_count();
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

CheckReport run_check(CheckKind k, const Scenario& s, const std::vector<Vec>& points, const DerivEngine& engine,
                      const Tolerances& tol, const CheckOptions& opt) {
    CheckReport rep;
    rep.kind = k;
    if (k == CheckKind::AppendixC && !s.orig) {
        rep.run = false;
        rep.note = "not run: scenario has no original geometry";
        rep.pass = true;
        return rep;
    }
    rep.run = true;
    rep.points.resize(points.size());
    calibrated_group_sign();
    parallel_for(static_cast<int>(points.size()), opt.threads, [&](int i) {
        PointResult& pr = rep.points[static_cast<std::size_t>(i)];
        pr.index = i;
        pr.y = points[static_cast<std::size_t>(i)];
        try {
            pr.residuals = check_point(k, s, pr.y, i, engine, tol, opt);
        } catch (const std::exception& e) {
            pr.error = e.what();
        }
    });
    rep.pass = std::all_of(rep.points.begin(), rep.points.end(), [](const PointResult& p) { return p.ok(); });
    if (k == CheckKind::Sde && !points.empty()) {
        const ReducedSdeCoeffs c = s.orig ? reduced_coefficients(*s.orig, s.adapted, points.front(), engine)
                                          : reduced_coefficients(s.adapted, points.front(), engine);
        rep.moments = euler_maruyama_check(c, opt.sde, opt.dt, opt.n_paths, opt.seed, tol.stat_sigma, opt.threads);
        rep.pass = rep.pass && rep.moments->pass;
        rep.note = s.orig ? "moments at point 0, original-data drift" : "moments at point 0, divergence-form drift";
    }
    return rep;
}

PointValues point_values(const Scenario& s, const Vec& y, const DerivEngine& engine) {
    PointValues v;
    v.b = assemble_scalar_curvature(s.adapted, y, engine);
    const double R_P = ricci_nonholonomic(s.adapted, ChristoffelSource::General, y, engine).scalar;
    v.J_direct = v.b.lap_ln_d + v.b.grad_ln_d;
    v.J_geometric = jacobian_geometric(v.b, R_P);
    v.j_norm2 = j_norm_squared(s.adapted, y, engine);
    v.H = density_H(s.adapted, y);
    return v;
}

std::vector<PointValues> point_values(const Scenario& s, const std::vector<Vec>& points, const DerivEngine& engine,
                                      int threads) {
    std::vector<PointValues> out(points.size());
    calibrated_group_sign();
    parallel_for(static_cast<int>(points.size()), threads,
                 [&](int i) { out[static_cast<std::size_t>(i)] = point_values(s, points[static_cast<std::size_t>(i)], engine); });
    return out;
}

}  // namespace bcl
