// commands.hpp - verify, report and simulate front ends
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bcl_cli/config.hpp"

namespace bcl::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

std::string tool_version();

struct VerifyOutcome {
    RunConfig cfg;
    std::vector<CheckReport> reports;  // one per known check, in all_checks() order
    bool pass = false;
    double wall_s = 0.0;
};

struct ReportOutcome {
    RunConfig cfg;
    int n_x = 0, n_v = 0;
    std::vector<Vec> points;
    std::vector<PointValues> values;
    double wall_s = 0.0;
};

struct SimulateOutcome {
    RunConfig cfg;
    Vec y;
    std::string drift_source;
    MomentReport moments;
    double wall_s = 0.0;
};

// These throw ConfigError or ScenarioError for bad input.
VerifyOutcome cmd_verify(const RunConfig& cfg);
ReportOutcome cmd_report(const RunConfig& cfg);
SimulateOutcome cmd_simulate(const RunConfig& cfg);

std::string render(const VerifyOutcome& v);
std::string render(const ReportOutcome& r);
std::string render(const SimulateOutcome& s);

// Column names of the report table for a scenario with the given dims.
std::vector<std::string> report_columns(int n_x, int n_v);

// Full command line entry: parses args (without the program name), runs the
// subcommand and returns the exit code. Diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcl::cli
