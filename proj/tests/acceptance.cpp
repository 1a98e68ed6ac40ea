// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "bcl/checks.hpp"
#include "bcl/jacobian.hpp"

using namespace bcl;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double max_of(const CheckReport& r, const std::string& name) {
    for (const auto& s : r.summarize())
        if (s.name == name) return s.max;
    return NAN;  // residual missing: never passes a <= comparison
}

bool no_errors(const CheckReport& r) {
    for (const auto& p : r.points)
        if (!p.error.empty()) {
            std::printf("    point %d error: %s\n", p.index, p.error.c_str());
            return false;
        }
    return true;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Runner {
    DerivEngine engine;
    Tolerances tol;
    CheckOptions opt;

    CheckReport run(CheckKind k, const std::string& scenario, int points, std::uint64_t seed = 1,
                    int oracle_points = 0) {
        const Scenario s = build_scenario(scenario);
        CheckOptions o = opt;
        o.seed = seed;
        o.oracle_points = oracle_points;
        return run_check(k, s, sample_points(s, points, seed), engine, tol, o);
    }
};

Outcome christoffel(Runner& R) {
    Outcome out;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const char* s : {"twisted_bundle", "abelian_limit", "scaled_orbit"}) {
        const CheckReport r = R.run(CheckKind::Christoffel, s, 100);
        const double m = max_of(r, "table_vs_general");
        worst = std::max(worst, m);
        out.pass = out.pass && no_errors(r) && m <= 1e-8;
    }
    const double t = seconds(t0);
    out.pass = out.pass && t <= 60.0;
    out.detail = fmt("max rel %.2e over 3 x 100 points, %.1f s (limit 60 s)", worst, t);
    return out;
}

Outcome curvature(Runner& R) {
    Outcome out;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const auto& s : scenario_names()) {
        const CheckReport r = R.run(CheckKind::Curvature, s, 100);
        for (const char* n : {"table_vs_general", "table_vs_assembled", "general_vs_assembled"}) {
            const double m = max_of(r, n);
            worst = std::max(worst, m);
            out.pass = out.pass && m <= 1e-6;
        }
        out.pass = out.pass && no_errors(r);
    }
    const double t = seconds(t0);
    out.pass = out.pass && t <= 300.0;
    out.detail = fmt("three-way max rel %.2e over 4 x 100 points, %.1f s (limit 300 s)", worst, t);
    return out;
}

Outcome oracle(Runner& R) {
    Outcome out;
    const auto t0 = Clock::now();
    const CheckReport r = R.run(CheckKind::Curvature, "twisted_bundle", 25, 1, 25);
    const double m = max_of(r, "oracle_vs_assembled");
    const double inv = max_of(r, "oracle_orbit_invariance");
    const double t = seconds(t0);
    out.pass = no_errors(r) && m <= 1e-6 && inv <= 1e-6 && t <= 600.0;
    out.detail = fmt("oracle vs assembled %.2e, group invariance %.2e at 25 points, %.1f s (limit 600 s)", m, inv, t);
    return out;
}

Outcome jacobian(Runner& R) {
    Outcome out;
    double worst = 0.0, flat = 0.0;
    for (const auto& s : scenario_names()) {
        const CheckReport r = R.run(CheckKind::Jacobian, s, 100);
        const double m = max_of(r, "direct_vs_geometric");
        worst = std::max(worst, m);
        out.pass = out.pass && no_errors(r) && m <= 1e-6;
        if (s == "flat_product") {
            flat = max_of(r, "flat_jacobian");
            out.pass = out.pass && flat <= 1e-10;
        }
    }
    out.detail = fmt("direct vs geometric max rel %.2e over 4 x 100 points, flat |J| %.2e", worst, flat);
    return out;
}

Outcome second_form(Runner& R) {
    Outcome out;
    double proj = 0.0, jn = 0.0, ident = 0.0;
    for (const char* s : {"twisted_bundle", "abelian_limit", "flat_product"}) {
        const CheckReport sf = R.run(CheckKind::SecondForm, s, 50);
        const CheckReport ac = R.run(CheckKind::AppendixC, s, 50);
        out.pass = out.pass && no_errors(sf) && no_errors(ac) && ac.run;
        for (const char* n : {"j1_raw_vs_closed", "j2_raw_vs_closed", "j3_raw_vs_closed", "j4_raw_vs_closed"})
            proj = std::max(proj, max_of(sf, n));
        jn = std::max(jn, max_of(sf, "jnorm_vs_DdDd"));
        ident = std::max({ident, max_of(ac, "ident_Q_ast"), max_of(ac, "ident_f_tild")});
    }
    out.pass = out.pass && proj <= 1e-7 && jn <= 1e-9 && ident <= 1e-7;
    out.detail = fmt("j projections %.2e, |j|^2 vs DdDd %.2e, identities %.2e at 3 x 50 points", proj, jn, ident);
    return out;
}

Outcome determinant(Runner& R) {
    Outcome out;
    double det = 0.0, rt = 0.0;
    for (const auto& s : scenario_names()) {
        const CheckReport r = R.run(CheckKind::DetFact, s, 50);
        out.pass = out.pass && no_errors(r);
        det = std::max(det, max_of(r, "det_factorization"));
        rt = std::max(rt, max_of(r, "block_inverse_roundtrip"));
    }
    out.pass = out.pass && det <= 1e-9 && rt <= 1e-10;
    out.detail = fmt("det factorization %.2e, block inverse round trip %.2e at 4 x 50 points", det, rt);
    return out;
}

Outcome sde(Runner& R) {
    Outcome out;
    const auto t0 = Clock::now();
    double diff = 0.0, drift = 0.0, z = 0.0;
    const std::vector<std::pair<std::string, std::uint64_t>> runs = {
        {"twisted_bundle", 42}, {"abelian_limit", 43}, {"flat_product", 7}, {"scaled_orbit", 44}};
    for (const auto& [s, seed] : runs) {
        const CheckReport r = R.run(CheckKind::Sde, s, 20, seed);
        out.pass = out.pass && no_errors(r) && r.moments && r.moments->pass && r.moments->n_paths == 200000 &&
                   r.moments->dt == 1e-4;
        diff = std::max(diff, max_of(r, "diffusion_adapted"));
        if (s != "scaled_orbit") {
            diff = std::max(diff, max_of(r, "diffusion_original"));
            drift = std::max(drift, max_of(r, "drift_vs_divergence"));
        }
        if (r.moments) z = std::max({z, r.moments->max_mean_z, r.moments->max_cov_z});
    }
    const double t = seconds(t0);
    out.pass = out.pass && diff <= 1e-9 && drift <= 1e-7 && t <= 120.0;
    out.detail = fmt("XX^T %.2e, drift %.2e, worst moment z %.2f", diff, drift, z) +
                 fmt(" (4 sigma, 2e5 paths, dt 1e-4), %.1f s (limit 120 s)", t);
    return out;
}

Outcome degenerate(Runner& R) {
    Outcome out;
    const Scenario s = build_scenario("scaled_orbit");
    double g = 0.0, jd = 0.0, jg = 0.0;
    for (const Vec& y : sample_points(s, 100, 1)) {
        const PointValues v = point_values(s, y, R.engine);
        g = std::max(g, std::abs(v.b.grad_ln_d - 9.0));
        jd = std::max(jd, std::abs(v.J_direct - 9.0));
        jg = std::max(jg, std::abs(v.J_geometric - 9.0));
    }
    out.pass = g <= 1e-8 && jd <= 1e-8 && jg <= 1e-8;
    out.detail = fmt("|grad_ln_d - 9| %.2e, |J direct - 9| %.2e, |J geometric - 9| %.2e at 100 points", g, jd, jg);
    return out;
}

}  // namespace

int main() {
    Runner R;
    struct Criterion {
        const char* name;
        Outcome (*fn)(Runner&);
    };
    const Criterion criteria[] = {
        {"1 christoffel certification", christoffel},
        {"2 curvature decomposition", curvature},
        {"3 coordinate oracle", oracle},
        {"4 jacobian equality", jacobian},
        {"5 second fundamental form", second_form},
        {"6 determinant factorization", determinant},
        {"7 sde layer", sde},
        {"8 degenerate gates", degenerate},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.fn(R);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
