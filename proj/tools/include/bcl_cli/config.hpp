// config.hpp - run configuration for the bcl tool
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcl/checks.hpp"
#include "bcl/scenarios.hpp"

namespace bcl::cli {

enum class Format { Json, Csv, Text };

struct RunConfig {
    std::string scenario = "twisted_bundle";
    ScenarioParams params;
    int points = 20;
    std::uint64_t seed = 1;
    double fd_step = 1e-5;
    bool richardson = true;
    double tol_identity = 1e-6;
    double tol_oracle = 1e-6;
    double stat_sigma = 4.0;
    std::vector<CheckKind> checks = all_checks();
    Format format = Format::Text;
    std::string output;  // empty: stdout
    int oracle_points = 25;
    double dt = 1e-4;
    int n_paths = 200000;
    SdeParams sde;
    int threads = 0;
    bool timing = false;  // adds wall time, which makes reports run-dependent

    // Throws ConfigError naming the first bad key.
    void validate() const;

    DerivEngine engine() const;
    Tolerances tolerances() const;
    CheckOptions check_options() const;
};

// Keys accepted in a config file.
const std::vector<std::string>& config_keys();

// Applies a flat JSON object onto cfg. Unknown keys and type mismatches throw
// ConfigError with the key.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config_file(const std::string& path, RunConfig base = {});

std::vector<CheckKind> parse_checks(const std::string& list);
Format parse_format(const std::string& s);
std::string format_name(Format f);

nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace bcl::cli
