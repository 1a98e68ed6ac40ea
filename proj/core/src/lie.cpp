#include "bcl/lie.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/errors.hpp"

namespace bcl {

StructureConstants StructureConstants::zero(int n) { return StructureConstants(n); }

StructureConstants StructureConstants::su2(double scale) {
    StructureConstants s(3);
    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    for (int p = 0; p < 6; ++p) s(perms[p][0], perms[p][1], perms[p][2]) = (p < 3 ? 1.0 : -1.0) * scale;
    return s;
}

StructureConstants StructureConstants::scaled(double s) const {
    StructureConstants out = *this;
    for (double& v : out.c) v *= s;
    return out;
}

bool StructureConstants::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

Mat StructureConstants::ad(int a) const {
    Mat m(n_g, n_g);
    for (int g = 0; g < n_g; ++g)
        for (int b = 0; b < n_g; ++b) m(g, b) = (*this)(g, a, b);
    return m;
}

ValidityReport validate_structure_constants(const StructureConstants& c, double tol) {
    const int n = c.n_g;
    if (n < 0 || c.c.size() != static_cast<std::size_t>(n) * n * n)
        throw ShapeError("structure constants must have n_g^3 entries");
    ValidityReport r;
    for (int g = 0; g < n; ++g)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) r.antisymmetry = std::max(r.antisymmetry, std::abs(c(g, a, b) + c(g, b, a)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int g = 0; g < n; ++g)
                for (int m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (int q = 0; q < n; ++q)
                        s += c(q, a, b) * c(m, q, g) + c(q, b, g) * c(m, q, a) + c(q, g, a) * c(m, q, b);
                    r.jacobi = std::max(r.jacobi, std::abs(s));
                }
    for (int s = 0; s < n; ++s) {
        double t = 0.0;
        for (int a = 0; a < n; ++a) t += c(a, s, a);
        r.trace = std::max(r.trace, std::abs(t));
    }
    r.valid = r.antisymmetry <= tol && r.jacobi <= tol && r.trace <= tol;
    return r;
}

Mat killing_form(const StructureConstants& c) {
    const int n = c.n_g;
    Mat b = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int bb = 0; bb < n; ++bb) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
                for (int q = 0; q < n; ++q) s += c(m, a, q) * c(q, bb, m);
            b(a, bb) = s;
        }
    return b;
}

bool is_semisimple(const StructureConstants& c, double tol) {
    if (c.n_g == 0) return false;
    return std::abs(killing_form(c).determinant()) > tol;
}

double orbit_scalar_curvature(const StructureConstants& c, const Mat& d) {
    const int n = c.n_g;
    if (d.rows() != n || d.cols() != n) throw ShapeError("orbit metric must be n_g x n_g");
    const Mat di = invert_spd(d).inverse;
    double first = 0.0;
    for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
            double t = 0.0;
            for (int s = 0; s < n; ++s)
                for (int a = 0; a < n; ++a) t += c(s, m, a) * c(a, q, s);
            first += di(m, q) * t;
        }
    // 1/4 d_{ms} d^{ab} d^{en} c^m_{ea} c^s_{nb}
    double second = 0.0;
    for (int m = 0; m < n; ++m)
        for (int s = 0; s < n; ++s) {
            if (d(m, s) == 0.0) continue;
            double t = 0.0;
            for (int e = 0; e < n; ++e)
                for (int a = 0; a < n; ++a) {
                    const double cma = c(m, e, a);
                    if (cma == 0.0) continue;
                    for (int q = 0; q < n; ++q)
                        for (int b = 0; b < n; ++b) t += di(a, b) * di(e, q) * cma * c(s, q, b);
                }
            second += d(m, s) * t;
        }
    return 0.5 * first + 0.25 * second;
}

Tensor group_direction_derivative(const Tensor& t, const std::vector<Variance>& signature,
                                  const StructureConstants& c, int gamma, int sign) {
    if (static_cast<int>(signature.size()) != t.rank())
        throw ShapeError("covariance signature length does not match tensor rank");
    const int n = c.n_g;
    if (gamma < 0 || gamma >= n) throw ShapeError("group direction out of range");
    for (int s = 0; s < t.rank(); ++s)
        if (t.dim(s) < n) throw ShapeError("tensor slot smaller than the orbit dimension");
    Tensor out(t.shape(), 0.0);
    if (t.rank() == 0 || n == 0) return out;
    for (std::size_t pos = 0; pos < t.size(); ++pos) {
        std::vector<int> idx = t.unflat(pos);
        double acc = 0.0;
        for (int s = 0; s < t.rank(); ++s) {
            const int off = t.dim(s) - n;
            const int a = idx[static_cast<std::size_t>(s)] - off;
            if (a < 0) continue;
            std::vector<int> j = idx;
            for (int m = 0; m < n; ++m) {
                const double coef = signature[static_cast<std::size_t>(s)] == Variance::Lower ? c(m, gamma, a)
                                                                                               : -c(a, gamma, m);
                if (coef == 0.0) continue;
                j[static_cast<std::size_t>(s)] = off + m;
                acc += coef * t.at(j);
            }
        }
        out.values()[pos] = sign * acc;
    }
    return out;
}

}  // namespace bcl
