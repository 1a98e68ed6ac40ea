#include "bcl_cli/config.hpp"

#include <fstream>
#include <algorithm>
#include <climits>
#include <cstdint>
#include <sstream>

#include "bcl/errors.hpp"

namespace bcl::cli {

using nlohmann::json;

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "scenario", "params",     "points", "seed",          "fd_step", "richardson", "tol_identity",
        "tol_oracle", "stat_sigma", "checks", "format",       "output",  "oracle_points", "dt",
        "n_paths",  "mu2",        "kappa",  "mass",          "hbar",    "threads",    "timing"};
    return keys;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what, key);
}

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
}

long long get_integer(const json& v, const std::string& key) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    bad(key, "expected an integer");
}

int get_int(const json& v, const std::string& key) {
    long long n = get_integer(v, key);
    if (n < INT32_MIN || n > INT32_MAX) bad(key, "out of range");
    return static_cast<int>(n);
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) bad(key, "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) bad(key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

std::vector<CheckKind> parse_checks(const std::string& list) {
    std::vector<CheckKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, e - b + 1);
        if (item == "all") {
            for (CheckKind k : all_checks()) out.push_back(k);
            continue;
        }
        auto k = parse_check(item);
        if (!k) throw ConfigError("config key 'checks': unknown check '" + item + "'", "checks");
        out.push_back(*k);
    }
    std::vector<CheckKind> unique;
    for (CheckKind k : all_checks())
        for (CheckKind o : out)
            if (o == k) {
                unique.push_back(k);
                break;
            }
    return unique;
}

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "text") return Format::Text;
    throw ConfigError("config key 'format': expected json, csv or text, got '" + s + "'", "format");
}

std::string format_name(Format f) {
    switch (f) {
        case Format::Json: return "json";
        case Format::Csv: return "csv";
        case Format::Text: return "text";
    }
    return "text";
}

void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object", "config");
    const auto& keys = config_keys();
    for (const auto& [key, v] : j.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) bad(key, "unknown key");
        if (key == "scenario") {
            cfg.scenario = get_string(v, key);
        } else if (key == "params") {
            if (!v.is_object()) bad(key, "expected an object of numbers");
            cfg.params.clear();
            for (const auto& [pk, pv] : v.items()) {
                if (!pv.is_number()) bad("params." + pk, "expected a number");
                cfg.params[pk] = pv.get<double>();
            }
        } else if (key == "points") {
            cfg.points = get_int(v, key);
        } else if (key == "seed") {
            long long s = get_integer(v, key);
            if (s < 0) bad(key, "must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "fd_step") {
            cfg.fd_step = get_number(v, key);
        } else if (key == "richardson") {
            cfg.richardson = get_bool(v, key);
        } else if (key == "tol_identity") {
            cfg.tol_identity = get_number(v, key);
        } else if (key == "tol_oracle") {
            cfg.tol_oracle = get_number(v, key);
        } else if (key == "stat_sigma") {
            cfg.stat_sigma = get_number(v, key);
        } else if (key == "checks") {
            if (v.is_string()) {
                cfg.checks = parse_checks(v.get<std::string>());
            } else if (v.is_array()) {
                std::string joined;
                for (const auto& item : v) joined += get_string(item, key) + ",";
                cfg.checks = parse_checks(joined);
            } else {
                bad(key, "expected a list of check names");
            }
        } else if (key == "format") {
            cfg.format = parse_format(get_string(v, key));
        } else if (key == "output") {
            cfg.output = get_string(v, key);
        } else if (key == "oracle_points") {
            cfg.oracle_points = get_int(v, key);
        } else if (key == "dt") {
            cfg.dt = get_number(v, key);
        } else if (key == "n_paths") {
            cfg.n_paths = get_int(v, key);
        } else if (key == "mu2") {
            cfg.sde.mu2 = get_number(v, key);
        } else if (key == "kappa") {
            cfg.sde.kappa = get_number(v, key);
        } else if (key == "mass") {
            cfg.sde.mass = get_number(v, key);
        } else if (key == "hbar") {
            cfg.sde.hbar = get_number(v, key);
        } else if (key == "threads") {
            cfg.threads = get_int(v, key);
        } else if (key == "timing") {
            cfg.timing = get_bool(v, key);
        }
    }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path, "config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what(), "config");
    }
    apply_json(base, j);
    return base;
}

void RunConfig::validate() const {
    if (scenario.empty()) bad("scenario", "must not be empty");
    if (points < 1) bad("points", "must be at least 1");
    engine().validate();
    if (!(tol_identity > 0.0)) bad("tol_identity", "must be positive");
    if (!(tol_oracle > 0.0)) bad("tol_oracle", "must be positive");
    if (!(stat_sigma > 0.0)) bad("stat_sigma", "must be positive");
    if (checks.empty()) bad("checks", "must name at least one check");
    if (oracle_points < 0) bad("oracle_points", "must be non-negative");
    if (!(dt > 0.0)) bad("dt", "must be positive");
    if (n_paths < 2) bad("n_paths", "must be at least 2");
    if (threads < 0) bad("threads", "must be non-negative");
    sde.validate();
}

DerivEngine RunConfig::engine() const {
    DerivEngine e;
    e.fd_step = fd_step;
    e.richardson = richardson;
    return e;
}

Tolerances RunConfig::tolerances() const {
    Tolerances t;
    t.identity_rel = tol_identity;
    t.oracle_rel = tol_oracle;
    t.stat_sigma = stat_sigma;
    return t;
}

CheckOptions RunConfig::check_options() const {
    CheckOptions o;
    o.oracle_points = oracle_points;
    o.seed = seed;
    o.dt = dt;
    o.n_paths = n_paths;
    o.sde = sde;
    o.threads = threads;
    return o;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["scenario"] = cfg.scenario;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.params) j["params"][k] = v;
    j["points"] = cfg.points;
    j["seed"] = cfg.seed;
    j["fd_step"] = cfg.fd_step;
    j["richardson"] = cfg.richardson;
    j["tol_identity"] = cfg.tol_identity;
    j["tol_oracle"] = cfg.tol_oracle;
    j["stat_sigma"] = cfg.stat_sigma;
    j["checks"] = nlohmann::ordered_json::array();
    for (CheckKind k : cfg.checks) j["checks"].push_back(check_name(k));
    j["format"] = format_name(cfg.format);
    j["output"] = cfg.output;
    j["oracle_points"] = cfg.oracle_points;
    j["dt"] = cfg.dt;
    j["n_paths"] = cfg.n_paths;
    j["mu2"] = cfg.sde.mu2;
    j["kappa"] = cfg.sde.kappa;
    j["mass"] = cfg.sde.mass;
    j["hbar"] = cfg.sde.hbar;
    j["threads"] = cfg.threads;
    j["timing"] = cfg.timing;
    return j;
}

}  // namespace bcl::cli
