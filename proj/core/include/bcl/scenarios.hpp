// scenarios.hpp - built-in geometries with known structure
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcl/bundle.hpp"
#include "bcl/group_chart.hpp"

namespace bcl {

using ScenarioParams = std::map<std::string, double>;

struct Scenario {
    std::string name;
    int n_x = 0, n_v = 0, n_g = 0;
    AdaptedGeometry adapted;
    std::optional<OriginalGeometry> orig;
    std::optional<GroupChart> chart;
    std::function<double(const Vec&)> potential;
    Vec box_lo, box_hi;  // sample domain in (x, f)
    ScenarioParams params;
    bool expect_flat = false;  // every Jacobian and D d quantity vanishes
    GateReport gates;

    Vec center() const { return 0.5 * (box_lo + box_hi); }
    bool contains(const Vec& y) const;
};

std::vector<std::string> scenario_names();

// Default parameter values for a registered scenario.
ScenarioParams default_params(const std::string& name);

// Unknown names and out-of-range or unrecognized parameters raise ConfigError.
// Scenarios built from original data run the validity gates before returning
// and raise ScenarioError if any gate fails.
Scenario build_scenario(const std::string& name, const ScenarioParams& params = {});

// count = 1 gives the domain center; otherwise seeded uniform points in the box.
std::vector<Vec> sample_points(const Scenario& s, int count, std::uint64_t seed);

// Original geometry on P = R^{n_x} x G with metric k(x) + gamma(x)(B(x) dx + u_bar(a) da)^2,
// Killing fields along the left-invariant frame and section a = 0.
OriginalGeometry product_bundle(int n_x, const StructureConstants& c, const GroupChart& chart,
                                std::function<Mat(const Vec&)> k, std::function<Mat(const Vec&)> gamma,
                                std::function<Mat(const Vec&)> B, std::vector<Mat> gens, const Mat& G_V);

}  // namespace bcl
