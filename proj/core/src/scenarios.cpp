#include "bcl/scenarios.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

double param(const ScenarioParams& p, const std::string& key) { return p.at(key); }

ScenarioParams merge(const std::string& name, const ScenarioParams& given) {
    ScenarioParams out = default_params(name);
    for (const auto& [k, v] : given) {
        if (!out.count(k)) throw ConfigError("unknown parameter '" + k + "' for scenario " + name, k);
        if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' must be finite", k);
        out[k] = v;
    }
    return out;
}

void require_positive(const ScenarioParams& p, const std::string& key) {
    if (!(p.at(key) > 0.0)) throw ConfigError("parameter '" + key + "' must be positive", key);
}

void require_flag(const ScenarioParams& p, const std::string& key) {
    const double v = p.at(key);
    if (v != 0.0 && v != 1.0) throw ConfigError("parameter '" + key + "' must be 0 or 1", key);
}

Vec box(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

double half_norm2(const Vec& y) { return 0.5 * y.squaredNorm(); }

Mat twisted_k(const Vec& x) {
    Mat k(2, 2);
    k << 1.2 + 0.3 * std::sin(x(0)), 0.1 * x(1), 0.1 * x(1), 0.9 + 0.2 * x(0) * x(0);
    return k;
}

Mat twisted_gamma(const Vec& x) {
    Mat g(3, 3);
    g << 1.0 + 0.3 * x(0), 0.1 * x(1), 0.05, 0.1 * x(1), 1.4 + 0.2 * x(1) * x(1), 0.05 + 0.1 * x(0), 0.05,
        0.05 + 0.1 * x(0), 0.8 + 0.2 * x(0) * x(1);
    return g;
}

Mat twisted_B(const Vec& x, double s) {
    Mat b(3, 2);
    b << 0.3 * x(1), 0.1, -0.2 * x(0), 0.25 * x(0) * x(1), 0.15, 0.2 * std::sin(x(0));
    return s * b;
}

void run_gates(Scenario& s) {
    if (!s.orig) return;
    const ValidityReport cv = validate_structure_constants(s.orig->c);
    if (!cv.valid) throw ScenarioError(s.name + ": structure constants fail antisymmetry or Jacobi");
    std::vector<Vec> pts = sample_points(s, 5, 12345);
    pts.push_back(s.center());
    s.gates = validate_original(*s.orig, pts);
    if (!s.gates.pass) {
        std::ostringstream os;
        os << s.name << ": validity gates failed (killing " << s.gates.killing << ", brackets " << s.gates.brackets
           << ", section " << s.gates.section << ", FP condition " << s.gates.fp_cond << ", min eig d "
           << s.gates.min_d_eig << ")";
        throw ScenarioError(os.str());
    }
}

Scenario finish_original(Scenario s, OriginalGeometry orig) {
    s.adapted = compile_adapted(orig);
    s.orig = std::move(orig);
    run_gates(s);
    return s;
}

Scenario flat_product(const ScenarioParams& p) {
    require_positive(p, "lambda");
    require_flag(p, "su2");
    const double lambda = param(p, "lambda");
    const bool su2 = param(p, "su2") == 1.0;
    Scenario s;
    s.name = "flat_product";
    s.n_x = 2;
    s.n_v = 2;
    s.n_g = 3;
    s.params = p;
    s.expect_flat = true;
    s.box_lo = box({-1.0, -1.0, -1.0, -1.0});
    s.box_hi = box({1.0, 1.0, 1.0, 1.0});
    s.potential = half_norm2;
    const StructureConstants c = su2 ? StructureConstants::su2() : StructureConstants::zero(3);
    const GroupChart chart = su2 ? GroupChart(so3_generators(), 3.0) : GroupChart::abelian(3);
    s.chart = chart;
    Mat k0(2, 2);
    k0 << 1.0, 0.2, 0.2, 1.5;
    Mat GV(2, 2);
    GV << 1.0, 0.1, 0.1, 2.0;
    // The group acts trivially on V, so the orbit metric is exactly lambda I.
    std::vector<Mat> gens(3, Mat::Zero(2, 2));
    OriginalGeometry orig = product_bundle(
        2, c, chart, [k0](const Vec&) { return k0; },
        [lambda](const Vec&) { return Mat(lambda * Mat::Identity(3, 3)); },
        [](const Vec&) { return Mat(Mat::Zero(3, 2)); }, gens, GV);
    return finish_original(std::move(s), std::move(orig));
}

Scenario scaled_orbit(const ScenarioParams& p) {
    const double a1 = param(p, "phi1"), a2 = param(p, "phi2");
    Scenario s;
    s.name = "scaled_orbit";
    s.n_x = 2;
    s.n_v = 1;
    s.n_g = 3;
    s.params = p;
    s.box_lo = box({-0.5, -0.5, -0.5});
    s.box_hi = box({0.5, 0.5, 0.5});
    s.potential = half_norm2;
    s.chart = GroupChart(so3_generators(), 3.0);
    AdaptedGeometry& g = s.adapted;
    g.n_x = 2;
    g.n_v = 1;
    g.n_g = 3;
    g.c = StructureConstants::su2();
    // phi(x) = a1 x1 + a2 x1^2, d = exp(2 phi) I.
    auto phi = [a1, a2](const Vec& y) { return a1 * y(0) + a2 * y(0) * y(0); };
    auto dphi = [a1, a2](const Vec& y) { return a1 + 2.0 * a2 * y(0); };
    g.h_tilde = make_field(3, 3, [](const Vec&) { return Mat(Mat::Identity(3, 3)); },
                           [](const Vec&) { return std::vector<Mat>(3, Mat::Zero(3, 3)); });
    g.d = make_field(
        3, 3, [phi](const Vec& y) { return Mat(std::exp(2.0 * phi(y)) * Mat::Identity(3, 3)); },
        [phi, dphi](const Vec& y) {
            std::vector<Mat> out(3, Mat::Zero(3, 3));
            out[0] = 2.0 * dphi(y) * std::exp(2.0 * phi(y)) * Mat::Identity(3, 3);
            return out;
        });
    g.A = make_field(3, 3, [](const Vec&) { return Mat(Mat::Zero(3, 3)); },
                     [](const Vec&) { return std::vector<Mat>(3, Mat::Zero(3, 3)); });
    return s;
}

Scenario twisted_family(const std::string& name, const ScenarioParams& p, bool abelian) {
    require_positive(p, "g_v");
    const double gv = param(p, "g_v"), coupling = param(p, "coupling");
    Scenario s;
    s.name = name;
    s.n_x = 2;
    s.n_v = 3;
    s.n_g = 3;
    s.params = p;
    s.box_lo = box({-0.5, -0.5, -0.8, -0.8, -0.8});
    s.box_hi = box({0.5, 0.5, 0.8, 0.8, 0.8});
    s.potential = half_norm2;
    StructureConstants c;
    std::vector<Mat> gens;
    GroupChart chart;
    if (abelian) {
        c = StructureConstants::zero(3);
        chart = GroupChart::abelian(3);
        Mat j12 = Mat::Zero(3, 3);
        j12(0, 1) = 1.0;
        j12(1, 0) = -1.0;
        gens = {j12, 0.5 * j12, Mat::Zero(3, 3)};
    } else {
        c = StructureConstants::su2();
        chart = GroupChart(so3_generators(), 3.0);
        // e_a = -T_a, so that -[e_a, e_b] = c^g_ab e_g.
        for (const Mat& t : so3_generators()) gens.push_back(-t);
    }
    s.chart = chart;
    OriginalGeometry orig = product_bundle(
        2, c, chart, twisted_k, twisted_gamma, [coupling](const Vec& x) { return twisted_B(x, coupling); }, gens,
        gv * Mat::Identity(3, 3));
    return finish_original(std::move(s), std::move(orig));
}

}  // namespace

bool Scenario::contains(const Vec& y) const {
    if (y.size() != box_lo.size()) return false;
    return ((y - box_lo).array() >= 0.0).all() && ((box_hi - y).array() >= 0.0).all();
}

std::vector<std::string> scenario_names() { return {"flat_product", "scaled_orbit", "twisted_bundle", "abelian_limit"}; }

ScenarioParams default_params(const std::string& name) {
    if (name == "flat_product") return {{"lambda", 1.0}, {"su2", 1.0}};
    if (name == "scaled_orbit") return {{"phi1", 1.0}, {"phi2", 0.0}};
    if (name == "twisted_bundle" || name == "abelian_limit") return {{"g_v", 0.7}, {"coupling", 1.0}};
    throw ConfigError("unknown scenario: " + name, "scenario");
}

Scenario build_scenario(const std::string& name, const ScenarioParams& params) {
    const ScenarioParams p = merge(name, params);
    if (name == "flat_product") return flat_product(p);
    if (name == "scaled_orbit") return scaled_orbit(p);
    if (name == "twisted_bundle") return twisted_family(name, p, false);
    return twisted_family(name, p, true);
}

std::vector<Vec> sample_points(const Scenario& s, int count, std::uint64_t seed) {
    if (count < 1) throw ConfigError("point count must be at least 1", "points");
    if (count == 1) return {s.center()};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec y(s.box_lo.size());
        for (Eigen::Index j = 0; j < y.size(); ++j) y(j) = s.box_lo(j) + unit(rng) * (s.box_hi(j) - s.box_lo(j));
        out.push_back(y);
    }
    return out;
}

OriginalGeometry product_bundle(int n_x, const StructureConstants& c, const GroupChart& chart,
                                std::function<Mat(const Vec&)> k, std::function<Mat(const Vec&)> gamma,
                                std::function<Mat(const Vec&)> B, std::vector<Mat> gens, const Mat& G_V) {
    const int n = c.n_g;
    if (chart.n_g() != n || static_cast<int>(gens.size()) != n) throw ShapeError("chart, generators and n_g disagree");
    OriginalGeometry o;
    o.n_P = n_x + n;
    o.n_v = static_cast<int>(G_V.rows());
    o.n_g = n;
    o.c = c;
    o.G_V = G_V;
    o.gens = std::move(gens);
    auto ch = std::make_shared<GroupChart>(chart);
    o.G_P = [n_x, n, ch, k, gamma, B](const Vec& Q) {
        const Vec x = Q.head(n_x), a = Q.tail(n);
        const Mat g = gamma(x);
        Mat theta(n, n_x + n);  // Theta = B dx + u_bar da
        theta << B(x), ch->u_bar(a);
        Mat G = theta.transpose() * g * theta;
        G.topLeftCorner(n_x, n_x) += k(x);
        return Mat(0.5 * (G + G.transpose()));
    };
    o.K_P = [n_x, n, ch](const Vec& Q) {
        Mat K = Mat::Zero(n_x + n, n);
        K.bottomRows(n) = ch->frames(Q.tail(n)).v;
        return K;
    };
    o.section = [n_x, n](const Vec& x) {
        Vec Q = Vec::Zero(n_x + n);
        Q.head(n_x) = x;
        return Q;
    };
    o.section_jac = [n_x, n](const Vec&) {
        Mat J = Mat::Zero(n_x + n, n_x);
        J.topRows(n_x) = Mat::Identity(n_x, n_x);
        return J;
    };
    o.chi = [n_x, n](const Vec& Q) { return Vec(Q.tail(n)); };
    o.chi_jac = [n_x, n](const Vec&) {
        Mat J = Mat::Zero(n, n_x + n);
        J.rightCols(n) = Mat::Identity(n, n);
        return J;
    };
    return o;
}

}  // namespace bcl
