#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "bcl/errors.hpp"
#include "bcl_cli/commands.hpp"

namespace bcl::cli {

namespace {

struct Flags {
    std::string config, scenario, checks, format, output;
    std::vector<std::string> params;
    int points = 0, oracle_points = 0, n_paths = 0, threads = 0;
    std::uint64_t seed = 0;
    double fd_step = 0, tol_identity = 0, tol_oracle = 0, stat_sigma = 0, dt = 0;
    bool richardson = true, timing = false;
};

using OptionMap = std::map<std::string, CLI::Option*>;

OptionMap add_options(CLI::App* sub, Flags& f) {
    OptionMap m;
    m["config"] = sub->add_option("config,--config", f.config, "Flat JSON config file");
    m["scenario"] = sub->add_option("--scenario", f.scenario, "Scenario name");
    m["params"] = sub->add_option("--param", f.params, "Scenario parameter as key=value (repeatable)");
    m["points"] = sub->add_option("--points", f.points, "Number of sample points");
    m["seed"] = sub->add_option("--seed", f.seed, "Seed for sample points and simulation");
    m["fd_step"] = sub->add_option("--fd-step", f.fd_step, "Base finite-difference step");
    m["richardson"] = sub->add_flag("--richardson,!--no-richardson", f.richardson, "Richardson extrapolation");
    m["tol_identity"] = sub->add_option("--tol-identity", f.tol_identity, "Relative tolerance for identities");
    m["tol_oracle"] = sub->add_option("--tol-oracle", f.tol_oracle, "Relative tolerance for the coordinate oracle");
    m["stat_sigma"] = sub->add_option("--stat-sigma", f.stat_sigma, "Moment check threshold in standard errors");
    m["checks"] = sub->add_option("--checks", f.checks, "Comma separated checks or 'all'");
    m["format"] = sub->add_option("--format", f.format, "json, csv or text");
    m["output"] = sub->add_option("--output", f.output, "Output path (default stdout)");
    m["oracle_points"] = sub->add_option("--oracle-points", f.oracle_points, "Points that also run the oracle");
    m["dt"] = sub->add_option("--dt", f.dt, "Euler-Maruyama step");
    m["n_paths"] = sub->add_option("--n-paths", f.n_paths, "Euler-Maruyama path count");
    m["threads"] = sub->add_option("--threads", f.threads, "Worker count (0: BCL_THREADS or hardware)");
    m["timing"] = sub->add_flag("--timing", f.timing, "Include wall time in the report");
    return m;
}

RunConfig resolve(const Flags& f, const OptionMap& m) {
    const auto set = [&](const char* key) { return m.at(key)->count() > 0; };
    RunConfig cfg;
    if (set("config")) cfg = load_config_file(f.config, cfg);
    if (set("scenario")) cfg.scenario = f.scenario;
    if (set("params")) {
        for (const std::string& kv : f.params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'", "params");
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            std::size_t used = 0;
            double d = 0.0;
            try {
                d = std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != val.size())
                throw ConfigError("config key 'params." + key + "': expected a number", "params." + key);
            cfg.params[key] = d;
        }
    }
    if (set("points")) cfg.points = f.points;
    if (set("seed")) cfg.seed = f.seed;
    if (set("fd_step")) cfg.fd_step = f.fd_step;
    if (set("richardson")) cfg.richardson = f.richardson;
    if (set("tol_identity")) cfg.tol_identity = f.tol_identity;
    if (set("tol_oracle")) cfg.tol_oracle = f.tol_oracle;
    if (set("stat_sigma")) cfg.stat_sigma = f.stat_sigma;
    if (set("checks")) cfg.checks = parse_checks(f.checks);
    if (set("format")) cfg.format = parse_format(f.format);
    if (set("output")) cfg.output = f.output;
    if (set("oracle_points")) cfg.oracle_points = f.oracle_points;
    if (set("dt")) cfg.dt = f.dt;
    if (set("n_paths")) cfg.n_paths = f.n_paths;
    if (set("threads")) cfg.threads = f.threads;
    if (set("timing")) cfg.timing = f.timing;
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) throw ConfigError("cannot write output file " + cfg.output, "output");
    file << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for Kaluza-Klein style bundle reduction", "bcl"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Flags f;
    CLI::App* verify = app.add_subcommand("verify", "Run verification checks and exit 0 on pass, 1 on failure");
    CLI::App* report = app.add_subcommand("report", "Tabulate curvature terms, Jacobians and densities per point");
    CLI::App* simulate = app.add_subcommand("simulate", "Euler-Maruyama moment check at the first sample point");
    const OptionMap mv = add_options(verify, f);
    const OptionMap mr = add_options(report, f);
    const OptionMap ms = add_options(simulate, f);

    std::vector<std::string> storage = {"bcl"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (verify->parsed()) {
            const RunConfig cfg = resolve(f, mv);
            const VerifyOutcome v = cmd_verify(cfg);
            emit(cfg, render(v), out);
            if (cfg.timing) err << "wall time " << v.wall_s << " s\n";
            return v.pass ? kExitPass : kExitFail;
        }
        if (report->parsed()) {
            const RunConfig cfg = resolve(f, mr);
            const ReportOutcome r = cmd_report(cfg);
            emit(cfg, render(r), out);
            if (cfg.timing) err << "wall time " << r.wall_s << " s\n";
            return kExitPass;
        }
        const RunConfig cfg = resolve(f, ms);
        const SimulateOutcome s = cmd_simulate(cfg);
        emit(cfg, render(s), out);
        if (cfg.timing) err << "wall time " << s.wall_s << " s\n";
        return s.moments.pass ? kExitPass : kExitFail;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ScenarioError& e) {
        err << "error: scenario rejected: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    }
}

}  // namespace bcl::cli
