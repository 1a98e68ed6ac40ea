#include <iomanip>
#include <locale>
#include <sstream>

#include "bcl_cli/commands.hpp"

namespace bcl::cli {

using json = nlohmann::ordered_json;

namespace {

// 17 significant digits, '.' separator whatever the global locale says.
std::string num(double v) {
    if (v == 0.0) v = 0.0;  // no "-0" in tables
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

std::string short_num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_json(const Mat& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

json header(const char* command, const RunConfig& cfg) {
    json j;
    j["tool"] = "bcl";
    j["version"] = tool_version();
    j["command"] = command;
    j["config"] = to_json(cfg);
    return j;
}

std::string status(const CheckReport& r) {
    if (!r.run) return "not run";
    return r.pass ? "pass" : "fail";
}

json moments_json(const MomentReport& m) {
    json j;
    j["n_paths"] = m.n_paths;
    j["dt"] = m.dt;
    j["seed"] = m.seed;
    j["mean_expected"] = vec_json(m.mean_expected);
    j["mean_sample"] = vec_json(m.mean_sample);
    j["mean_se"] = vec_json(m.mean_se);
    j["cov_expected"] = mat_json(m.cov_expected);
    j["cov_sample"] = mat_json(m.cov_sample);
    j["cov_se"] = mat_json(m.cov_se);
    j["max_mean_z"] = m.max_mean_z;
    j["max_cov_z"] = m.max_cov_z;
    j["sigma"] = m.sigma;
    j["pass"] = m.pass;
    return j;
}

std::vector<double> row_values(const Vec& y, const PointValues& v) {
    std::vector<double> r(y.data(), y.data() + y.size());
    const CurvatureBreakdown& b = v.b;
    for (double x : {b.R_M, b.R_G, b.FF, b.DdDd, b.lap_ln_d, b.grad_ln_d, b.R_total, v.J_direct, v.J_geometric,
                     v.j_norm2, v.H})
        r.push_back(x);
    return r;
}

}  // namespace

std::vector<std::string> report_columns(int n_x, int n_v) {
    std::vector<std::string> c;
    for (int i = 1; i <= n_x; ++i) c.push_back("x" + std::to_string(i));
    for (int a = 1; a <= n_v; ++a) c.push_back("f" + std::to_string(a));
    for (const char* n : {"R_M", "R_G", "FF", "DdDd", "lap_ln_d", "grad_ln_d", "R_total", "J_direct", "J_geometric",
                          "j_norm2", "H"})
        c.push_back(n);
    return c;
}

std::string render(const VerifyOutcome& v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    switch (v.cfg.format) {
        case Format::Json: {
            json j = header("verify", v.cfg);
            j["pass"] = v.pass;
            j["checks"] = json::array();
            for (const CheckReport& r : v.reports) {
                json c;
                c["name"] = check_name(r.kind);
                c["status"] = status(r);
                c["note"] = r.note;
                c["summary"] = json::array();
                for (const auto& s : r.summarize())
                    c["summary"].push_back({{"name", s.name}, {"max", s.max}, {"mean", s.mean}, {"tol", s.tol},
                                            {"count", s.count}});
                c["points"] = json::array();
                for (const PointResult& p : r.points) {
                    json pj;
                    pj["index"] = p.index;
                    pj["y"] = vec_json(p.y);
                    pj["residuals"] = json::object();
                    for (const Residual& res : p.residuals) pj["residuals"][res.name] = res.value;
                    if (!p.error.empty()) pj["error"] = p.error;
                    c["points"].push_back(pj);
                }
                if (r.moments) c["moments"] = moments_json(*r.moments);
                j["checks"].push_back(c);
            }
            if (v.cfg.timing) j["wall_time_s"] = v.wall_s;
            os << j.dump(2) << '\n';
            break;
        }
        case Format::Csv: {
            os << "check,status,point,residual,value,tol,ok\n";
            for (const CheckReport& r : v.reports) {
                const std::string name = check_name(r.kind);
                if (!r.run) {
                    os << name << ",not run,,,,,\n";
                    continue;
                }
                for (const PointResult& p : r.points) {
                    if (!p.error.empty())
                        os << name << ',' << status(r) << ',' << p.index << ",error," << csv_field(p.error)
                           << ",,false\n";
                    for (const Residual& res : p.residuals)
                        os << name << ',' << status(r) << ',' << p.index << ',' << res.name << ',' << num(res.value)
                           << ',' << num(res.tol) << ',' << (res.ok() ? "true" : "false") << '\n';
                }
                if (r.moments) {
                    const MomentReport& m = *r.moments;
                    os << name << ',' << status(r) << ",moments,max_mean_z," << num(m.max_mean_z) << ','
                       << num(m.sigma) << ',' << (m.max_mean_z <= m.sigma ? "true" : "false") << '\n';
                    os << name << ',' << status(r) << ",moments,max_cov_z," << num(m.max_cov_z) << ','
                       << num(m.sigma) << ',' << (m.max_cov_z <= m.sigma ? "true" : "false") << '\n';
                }
            }
            break;
        }
        case Format::Text: {
            os << "bcl " << tool_version() << " verify  scenario=" << v.cfg.scenario << "  points=" << v.cfg.points
               << "  seed=" << v.cfg.seed << '\n';
            for (const CheckReport& r : v.reports) {
                std::string st = status(r);
                for (char& ch : st) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
                os << std::left << std::setw(12) << check_name(r.kind) << st;
                if (!r.note.empty()) os << "  (" << r.note << ')';
                os << '\n';
                for (const auto& s : r.summarize())
                    os << "  " << std::left << std::setw(28) << s.name << " max " << short_num(s.max) << "  mean "
                       << short_num(s.mean) << "  tol " << short_num(s.tol) << "  n=" << s.count << '\n';
                for (const PointResult& p : r.points)
                    if (!p.error.empty()) os << "  point " << p.index << " error: " << p.error << '\n';
                if (r.moments)
                    os << "  moments  max mean z " << short_num(r.moments->max_mean_z) << "  max cov z "
                       << short_num(r.moments->max_cov_z) << "  at " << r.moments->sigma << " sigma\n";
            }
            os << "overall " << (v.pass ? "PASS" : "FAIL") << '\n';
            if (v.cfg.timing) os << "wall time " << num(v.wall_s) << " s\n";
            break;
        }
    }
    return os.str();
}

std::string render(const ReportOutcome& r) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    const auto cols = report_columns(r.n_x, r.n_v);
    switch (r.cfg.format) {
        case Format::Json: {
            json j = header("report", r.cfg);
            j["columns"] = cols;
            j["rows"] = json::array();
            for (std::size_t i = 0; i < r.points.size(); ++i) {
                const auto vals = row_values(r.points[i], r.values[i]);
                json row = json::object();
                for (std::size_t c = 0; c < cols.size(); ++c) row[cols[c]] = vals[c];
                j["rows"].push_back(row);
            }
            if (r.cfg.timing) j["wall_time_s"] = r.wall_s;
            os << j.dump(2) << '\n';
            break;
        }
        case Format::Csv:
        case Format::Text: {
            const bool csv = r.cfg.format == Format::Csv;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (c) os << (csv ? "," : " ");
                if (csv)
                    os << cols[c];
                else
                    os << std::right << std::setw(24) << cols[c];
            }
            os << '\n';
            for (std::size_t i = 0; i < r.points.size(); ++i) {
                const auto vals = row_values(r.points[i], r.values[i]);
                for (std::size_t c = 0; c < vals.size(); ++c) {
                    if (c) os << (csv ? "," : " ");
                    if (csv)
                        os << num(vals[c]);
                    else
                        os << std::right << std::setw(24) << num(vals[c]);
                }
                os << '\n';
            }
            if (!csv && r.cfg.timing) os << "wall time " << num(r.wall_s) << " s\n";
            break;
        }
    }
    return os.str();
}

std::string render(const SimulateOutcome& s) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    const MomentReport& m = s.moments;
    switch (s.cfg.format) {
        case Format::Json: {
            json j = header("simulate", s.cfg);
            j["point"] = vec_json(s.y);
            j["drift_source"] = s.drift_source;
            j["moments"] = moments_json(m);
            j["pass"] = m.pass;
            if (s.cfg.timing) j["wall_time_s"] = s.wall_s;
            os << j.dump(2) << '\n';
            break;
        }
        case Format::Csv: {
            os << "moment,i,j,expected,sample,se,z\n";
            const auto z = [](double e, double x, double se) { return se > 0.0 ? std::abs(x - e) / se : 0.0; };
            for (Eigen::Index i = 0; i < m.mean_expected.size(); ++i)
                os << "mean," << i << ",," << num(m.mean_expected(i)) << ',' << num(m.mean_sample(i)) << ','
                   << num(m.mean_se(i)) << ',' << num(z(m.mean_expected(i), m.mean_sample(i), m.mean_se(i))) << '\n';
            for (Eigen::Index i = 0; i < m.cov_expected.rows(); ++i)
                for (Eigen::Index k = i; k < m.cov_expected.cols(); ++k)
                    os << "cov," << i << ',' << k << ',' << num(m.cov_expected(i, k)) << ','
                       << num(m.cov_sample(i, k)) << ',' << num(m.cov_se(i, k)) << ','
                       << num(z(m.cov_expected(i, k), m.cov_sample(i, k), m.cov_se(i, k))) << '\n';
            break;
        }
        case Format::Text: {
            os << "bcl " << tool_version() << " simulate  scenario=" << s.cfg.scenario << "  seed=" << s.cfg.seed
               << "  n_paths=" << m.n_paths << "  dt=" << num(m.dt) << '\n';
            os << "point";
            for (Eigen::Index i = 0; i < s.y.size(); ++i) os << ' ' << num(s.y(i));
            os << "\ndrift " << s.drift_source << '\n';
            os << "max mean z " << short_num(m.max_mean_z) << "  max cov z " << short_num(m.max_cov_z) << "  at "
               << m.sigma << " sigma\n";
            os << (m.pass ? "PASS" : "FAIL") << '\n';
            if (s.cfg.timing) os << "wall time " << num(s.wall_s) << " s\n";
            break;
        }
    }
    return os.str();
}

}  // namespace bcl::cli
