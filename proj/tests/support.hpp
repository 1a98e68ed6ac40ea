// support.hpp - small helpers shared by the unit tests
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>

#include "bcl/bundle.hpp"

namespace bcl::test {

inline Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// Adapted geometry from plain callables; every derivative goes through finite differences.
inline AdaptedGeometry adapted(int n_x, int n_v, const StructureConstants& c, std::function<Mat(const Vec&)> h,
                               std::function<Mat(const Vec&)> d, std::function<Mat(const Vec&)> A) {
    AdaptedGeometry g;
    g.n_x = n_x;
    g.n_v = n_v;
    g.n_g = c.n_g;
    g.c = c;
    const int m = n_x + n_v;
    g.h_tilde = make_field(m, m, std::move(h));
    g.d = make_field(c.n_g, c.n_g, std::move(d));
    g.A = make_field(c.n_g, m, std::move(A));
    return g;
}

inline std::function<Mat(const Vec&)> constant(const Mat& m) {
    return [m](const Vec&) { return m; };
}

// Test-side derivative: fourth-order central stencil, independent of the library engine.
inline Mat cdiff(const std::function<Mat(const Vec&)>& f, const Vec& y, int slot, double h = 1e-3) {
    auto at = [&](double s) {
        Vec z = y;
        z(slot) += s;
        return f(z);
    };
    return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

}  // namespace bcl::test
