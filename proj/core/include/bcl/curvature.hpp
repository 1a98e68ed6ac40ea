// curvature.hpp - Ricci contraction in the lifted frame, the decomposition of
// the total scalar curvature and a coordinate-basis oracle
//
// Sign convention: the Ricci tensor is R_AC = d_A G^B_BC - d_B G^B_AC + ...,
// which is minus the textbook contraction. Every scalar here (including the
// coordinate oracle) uses that convention, so a round sphere comes out negative.
#pragma once

#include <functional>
#include <optional>

#include "bcl/connection.hpp"
#include "bcl/group_chart.hpp"

namespace bcl {

// Sign of the group-direction rule that makes the pure-orbit Ricci trace equal
// orbit_scalar_curvature. Computed once per process.
int calibrated_group_sign();

enum class ChristoffelSource { Table, General };

struct RicciResult {
    Mat ricci;    // N x N, frame components
    double scalar = 0.0;
};

// Full Ricci matrix and its contraction with blockdiag(h~^{-1}, d^{-1}).
// Horizontal derivatives of the symbols are taken by outer finite differences.
RicciResult ricci_nonholonomic(const AdaptedGeometry& g, ChristoffelSource src, const Vec& y,
                               const DerivEngine& engine, int sign = 0);
double ricci_component(const AdaptedGeometry& g, ChristoffelSource src, const Vec& y, const DerivEngine& engine,
                       int a, int c, int sign = 0);

struct CurvatureBreakdown {
    double R_M = 0.0;
    double R_G = 0.0;
    double FF = 0.0;
    double DdDd = 0.0;
    double lap_ln_d = 0.0;
    double grad_ln_d = 0.0;
    double R_total = 0.0;

    double sum() const { return R_M + R_G + FF + DdDd + lap_ln_d + grad_ln_d; }
};

CurvatureBreakdown decomposition_terms(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);
CurvatureBreakdown assemble_scalar_curvature(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

double ff_term(const FramePoint& fp);
double dd_term(const FramePoint& fp);

// Scalar curvature of a coordinate metric by the textbook Christoffel formulas
// with finite differences only, reported in the convention above.
using MetricFn = std::function<Mat(const Vec&)>;
using MetricDerivFn = std::function<std::vector<Mat>(const Vec&)>;
double coordinate_scalar_curvature(const MetricFn& metric, const Vec& z, const DerivEngine& engine,
                                   const MetricDerivFn& dmetric = {});

// Full-space metric in (x, f, a) coordinates assembled from the adapted fields
// and the chart's right-invariant forms, then the coordinate formula above.
double scalar_curvature_coordinate_oracle(const AdaptedGeometry& g, const GroupChart& chart, const Vec& y,
                                          const Vec& a, const DerivEngine& engine);

}  // namespace bcl
