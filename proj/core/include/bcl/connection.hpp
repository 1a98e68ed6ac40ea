// connection.hpp - connection curvature, covariant derivative of the orbit
// metric and Christoffel symbols in the horizontal-lift frame
//
// Frame index layout: [0, n_x) base, [n_x, m) vector, [m, m + n_g) orbit.
#pragma once

#include <string>
#include <vector>

#include "bcl/bundle.hpp"
#include "bcl/tensor.hpp"

namespace bcl {

// Adapted fields and their first partials at one chart point.
struct FramePoint {
    int n_x = 0, n_v = 0, n_g = 0, m = 0, N = 0;
    Vec y;
    Mat h, h_inv, d, d_inv, A;
    std::vector<Mat> dh, dd, dA;  // one per chart slot
    Tensor F;   // F(mu, A', C')
    Tensor Dd;  // Dd(A', mu, nu)
};

FramePoint evaluate_frame(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

Tensor curvature_F(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);
Tensor covariant_D_orbit_metric(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

// Structure functions CC(A, B, C) = CC^A_{BC} of the frame commutators.
Tensor structure_functions(const FramePoint& fp, const StructureConstants& c);
Tensor structure_functions(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

enum class Block { Base, Vec, Orbit };

struct ChristoffelBlocks {
    int n_x = 0, n_v = 0, n_g = 0;
    Tensor gamma;  // gamma(A, B, C) = Gamma^A_{BC}

    int m() const { return n_x + n_v; }
    int N() const { return n_x + n_v + n_g; }
    double operator()(int a, int b, int c) const { return gamma(a, b, c); }

    Tensor block(Block up, Block lo1, Block lo2) const;
    // Gamma^g_{g A'} for every horizontal A'.
    Vec orbit_trace() const;
    // Gamma^a_{a g} summed over orbit a, for each orbit g.
    Vec orbit_orbit_trace() const;

    static std::string block_name(Block up, Block lo1, Block lo2);
};

// Levi-Civita symbols of h~ on the (x, f) chart: out(C', A', B').
Tensor base_levi_civita(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);
Tensor base_levi_civita(const FramePoint& fp);

// General nonholonomic formula; group-direction derivatives are algebraic.
// sign = 0 selects the calibrated sign of the group-direction rule.
ChristoffelBlocks christoffel_general(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine,
                                      int sign = 0);
ChristoffelBlocks christoffel_general(const FramePoint& fp, const StructureConstants& c, int sign = 0);

// Closed-form table, block by block.
ChristoffelBlocks christoffel_table(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);
ChristoffelBlocks christoffel_table(const FramePoint& fp, const StructureConstants& c);

struct SectorResidual {
    std::string name;
    double abs = 0.0;
    double rel = 0.0;
};

// Per-sector residuals; rel is scaled by the largest symbol magnitude at the point.
std::vector<SectorResidual> compare_christoffel(const ChristoffelBlocks& a, const ChristoffelBlocks& b);
double max_relative(const std::vector<SectorResidual>& r);

// Gamma^A_{BC} - Gamma^A_{CB} - CC^A_{BC}, max abs.
double torsion_balance_residual(const ChristoffelBlocks& g, const Tensor& cc);

// Group-direction derivative of a frame tensor (each slot of size N).
Tensor frame_group_derivative(const Tensor& t, const std::vector<Variance>& sig, const StructureConstants& c,
                              int gamma, int sign);

}  // namespace bcl
