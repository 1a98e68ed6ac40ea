#include "bcl_cli/commands.hpp"

#include <chrono>

#include "bcl/errors.hpp"

#ifndef BCL_VERSION
#define BCL_VERSION "0.0.0"
#endif

namespace bcl::cli {

std::string tool_version() { return BCL_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario build(const RunConfig& cfg) {
    cfg.validate();
    return build_scenario(cfg.scenario, cfg.params);
}

}  // namespace

VerifyOutcome cmd_verify(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const Scenario s = build(cfg);
    const auto pts = sample_points(s, cfg.points, cfg.seed);
    const DerivEngine engine = cfg.engine();
    const Tolerances tol = cfg.tolerances();
    const CheckOptions opt = cfg.check_options();

    VerifyOutcome out;
    out.cfg = cfg;
    out.pass = true;
    for (CheckKind k : all_checks()) {
        bool selected = false;
        for (CheckKind c : cfg.checks) selected = selected || c == k;
        if (!selected) {
            CheckReport r;
            r.kind = k;
            r.run = false;
            r.pass = true;
            r.note = "not run: not selected";
            out.reports.push_back(std::move(r));
            continue;
        }
        out.reports.push_back(run_check(k, s, pts, engine, tol, opt));
        out.pass = out.pass && out.reports.back().pass;
    }
    out.wall_s = seconds_since(t0);
    return out;
}

ReportOutcome cmd_report(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const Scenario s = build(cfg);
    ReportOutcome out;
    out.cfg = cfg;
    out.n_x = s.n_x;
    out.n_v = s.n_v;
    out.points = sample_points(s, cfg.points, cfg.seed);
    out.values = point_values(s, out.points, cfg.engine(), cfg.threads);
    out.wall_s = seconds_since(t0);
    return out;
}

SimulateOutcome cmd_simulate(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const Scenario s = build(cfg);
    const DerivEngine engine = cfg.engine();
    SimulateOutcome out;
    out.cfg = cfg;
    out.y = sample_points(s, cfg.points, cfg.seed).front();
    ReducedSdeCoeffs c;
    if (s.orig) {
        c = reduced_coefficients(*s.orig, s.adapted, out.y, engine);
        out.drift_source = "original";
    } else {
        c = reduced_coefficients(s.adapted, out.y, engine);
        out.drift_source = "divergence";
    }
    out.moments = euler_maruyama_check(c, cfg.sde, cfg.dt, cfg.n_paths, cfg.seed, cfg.stat_sigma, cfg.threads);
    out.wall_s = seconds_since(t0);
    return out;
}

}  // namespace bcl::cli
