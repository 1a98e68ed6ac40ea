// lie.hpp - Lie algebra data, validity gates, orbit curvature, adjoint rule
#pragma once

#include <vector>

#include "bcl/fields.hpp"
#include "bcl/tensor.hpp"

namespace bcl {

// c[g][a][b] = c^g_{ab}, so that [e_a, e_b] = c^g_{ab} e_g.
struct StructureConstants {
    int n_g = 0;
    std::vector<double> c;

    StructureConstants() = default;
    explicit StructureConstants(int n) : n_g(n), c(static_cast<std::size_t>(n) * n * n, 0.0) {}

    double operator()(int g, int a, int b) const { return c[index(g, a, b)]; }
    double& operator()(int g, int a, int b) { return c[index(g, a, b)]; }

    static StructureConstants zero(int n);
    // su(2) in the basis with c^g_{ab} = scale * epsilon_{gab}.
    static StructureConstants su2(double scale = 1.0);
    StructureConstants scaled(double s) const;
    bool is_zero() const;

    // Matrix of ad(e_a): (ad_a)^g_b = c^g_{ab}.
    Mat ad(int a) const;

private:
    std::size_t index(int g, int a, int b) const {
        return (static_cast<std::size_t>(g) * static_cast<std::size_t>(n_g) + static_cast<std::size_t>(a)) *
                   static_cast<std::size_t>(n_g) +
               static_cast<std::size_t>(b);
    }
};

struct ValidityReport {
    double antisymmetry = 0.0;
    double jacobi = 0.0;
    double trace = 0.0;
    bool valid = false;
};

ValidityReport validate_structure_constants(const StructureConstants& c, double tol = 1e-12);

// B_{ab} = c^m_{an} c^n_{bm}.
Mat killing_form(const StructureConstants& c);
bool is_semisimple(const StructureConstants& c, double tol = 1e-12);

// R_G = 1/2 d^{mn} c^s_{ma} c^a_{ns} + 1/4 d_{ms} d^{ab} d^{en} c^m_{ea} c^s_{nb}.
double orbit_scalar_curvature(const StructureConstants& c, const Mat& d);

enum class Variance { Upper, Lower };

// L_g acting on a group-covariant tensor evaluated at the group identity.
// Each slot's last n_g components are orbit components; leading components
// (horizontal directions of a frame array) are inert. With sign = +1:
//   lower slot:  + c^m_{g a} T_{..m..}
//   upper slot:  - c^a_{g m} T^{..m..}
Tensor group_direction_derivative(const Tensor& t, const std::vector<Variance>& signature,
                                  const StructureConstants& c, int gamma, int sign = +1);

}  // namespace bcl
