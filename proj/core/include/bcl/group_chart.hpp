// group_chart.hpp - canonical coordinates on a matrix Lie group
//
// g(a) = exp(a^k T_k). Columns of u_bar are the right-invariant form
// (dg g^{-1}) and columns of u the left-invariant form (g^{-1} dg), both
// expanded in the generator basis. v = u^{-1}, rho = u_bar v = Ad(g).
#pragma once

#include <vector>

#include "bcl/fields.hpp"

namespace bcl {

struct GroupFrames {
    Mat u, v, u_bar, v_bar, rho, rho_bar;
};

class GroupChart {
public:
    GroupChart() = default;
    // Generators T_k of a matrix Lie algebra; max_norm bounds the chart domain.
    GroupChart(std::vector<Mat> generators, double max_norm);
    // R^n with trivial brackets: every frame is the identity.
    static GroupChart abelian(int n);

    int n_g() const { return n_g_; }
    double max_norm() const { return max_norm_; }
    bool is_abelian() const { return abelian_; }

    Mat element(const Vec& a) const;
    GroupFrames frames(const Vec& a) const;
    Mat u_bar(const Vec& a) const { return frames(a).u_bar; }

    // Expansion coefficients of a Lie algebra matrix in the generator basis.
    Vec coordinates(const Mat& algebra_element) const;

private:
    void check_domain(const Vec& a) const;

    int n_g_ = 0;
    double max_norm_ = 0.0;
    bool abelian_ = false;
    std::vector<Mat> gens_;
    Mat basis_pinv_;
};

// so(3) generators (T_k)_{ij} = -epsilon_{kij}, so that [T_1, T_2] = T_3.
std::vector<Mat> so3_generators();

}  // namespace bcl
