// checks.hpp - per-point verification runners shared by the CLI and tests
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcl/curvature.hpp"
#include "bcl/scenarios.hpp"
#include "bcl/sde.hpp"

namespace bcl {

enum class CheckKind { Christoffel, Curvature, Jacobian, SecondForm, AppendixC, DetFact, Sde };

const std::vector<CheckKind>& all_checks();
std::string check_name(CheckKind k);
std::optional<CheckKind> parse_check(const std::string& name);

struct Tolerances {
    double identity_rel = 1e-6;  // curvature three-way and Jacobian equality
    double oracle_rel = 1e-6;    // coordinate oracle and its orbit invariance
    double stat_sigma = 4.0;     // Euler-Maruyama moments
    double christoffel = 1e-8;
    double flat_abs = 1e-10;
    double jnorm = 1e-9;
    double projection = 1e-7;
    double identities = 1e-7;
    double projector = 1e-10;
    double quadratic = 1e-9;
    double detfact = 1e-9;
    double roundtrip = 1e-10;
    double diffusion = 1e-9;
    double drift = 1e-7;
};

struct Residual {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool ok() const { return value <= tol; }
};

struct PointResult {
    int index = 0;
    Vec y;
    std::vector<Residual> residuals;
    std::string error;  // non-empty when the point threw
    bool ok() const;
};

struct CheckOptions {
    int oracle_points = 25;     // points (by index) that also run the coordinate oracle
    std::uint64_t seed = 1;     // drives group points for the oracle and the moment check
    double dt = 1e-4;
    int n_paths = 200000;
    SdeParams sde;
    int threads = 0;            // 0: BCL_THREADS or hardware concurrency
};

struct CheckReport {
    CheckKind kind{};
    bool run = false;
    std::string note;  // why the check did not run, or extra context
    std::vector<PointResult> points;
    std::optional<MomentReport> moments;
    bool pass = false;

    // Residual names in first-seen order with their max and mean over points.
    struct Summary {
        std::string name;
        double max = 0.0;
        double mean = 0.0;
        double tol = 0.0;
        int count = 0;
    };
    std::vector<Summary> summarize() const;
};

double rel_diff(double a, double b);

// Residuals of one check at one point. Throws on evaluation failure.
std::vector<Residual> check_point(CheckKind k, const Scenario& s, const Vec& y, int index, const DerivEngine& engine,
                                  const Tolerances& tol, const CheckOptions& opt);

// Runs a check over all points with per-point fan-out and ordered assembly.
CheckReport run_check(CheckKind k, const Scenario& s, const std::vector<Vec>& points, const DerivEngine& engine,
                      const Tolerances& tol, const CheckOptions& opt);

// Values tabulated by the report command.
struct PointValues {
    CurvatureBreakdown b;
    double J_direct = 0.0;
    double J_geometric = 0.0;
    double j_norm2 = 0.0;
    double H = 0.0;
};

PointValues point_values(const Scenario& s, const Vec& y, const DerivEngine& engine);
std::vector<PointValues> point_values(const Scenario& s, const std::vector<Vec>& points, const DerivEngine& engine,
                                      int threads = 0);

// Deterministic group point used by the oracle for a given seed and point index.
Vec oracle_group_point(int n_g, std::uint64_t seed, int index, int which);

// Runs fn(i) for i in [0, n) over a worker pool; the first exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace bcl
