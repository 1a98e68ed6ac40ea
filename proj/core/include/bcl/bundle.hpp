// bundle.hpp - original and adapted geometry, block metrics, projectors
//
// Index layout of the total space in adapted coordinates: (x, f, a) with
// n_x base, n_v vector and n_g group components. The orbit space chart point
// is y = (x, f) of length m = n_x + n_v. All tilded quantities are evaluated
// at the group identity.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bcl/fields.hpp"
#include "bcl/lie.hpp"

namespace bcl {

struct AdaptedGeometry {
    int n_x = 0;
    int n_v = 0;
    int n_g = 0;
    StructureConstants c;
    FieldHandle h_tilde;  // m x m
    FieldHandle d;        // n_g x n_g
    FieldHandle A;        // n_g x m, A(alpha, A') = connection component

    int m() const { return n_x + n_v; }
    int total() const { return n_x + n_v + n_g; }
    void check_point(const Vec& y) const;
};

struct OriginalGeometry {
    int n_P = 0;
    int n_v = 0;
    int n_g = 0;
    StructureConstants c;
    std::function<Mat(const Vec&)> G_P;  // n_P x n_P metric on P
    Mat G_V;                             // constant n_v x n_v metric on V
    std::function<Mat(const Vec&)> K_P;  // n_P x n_g, column alpha = K^A_alpha
    std::vector<Mat> gens;               // (e_alpha)^a_b, K^a_alpha = (e_alpha f)^a
    std::function<Vec(const Vec&)> section;      // x -> Q*(x)
    std::function<Mat(const Vec&)> section_jac;  // optional, n_P x n_x
    std::function<Vec(const Vec&)> chi;          // gauge condition, length n_g
    std::function<Mat(const Vec&)> chi_jac;      // optional, n_g x n_P

    int n_x() const { return n_P - n_g; }
    int m() const { return n_x() + n_v; }
    Mat K_V(const Vec& f) const;  // n_v x n_g
};

struct OrbitMetricValue {
    Mat d;
    Mat d_inv;
    Mat gamma;        // G_AB K^A K^B
    Mat gamma_prime;  // G_ab K^a K^b
};

struct ConnectionValue {
    Mat A_x;      // n_g x n_x, uses d^{-1}
    Mat A_v;      // n_g x n_v
    Mat A_gamma;  // n_g x n_x, uses gamma^{-1}
};

struct HorizontalMetricValue {
    Mat GHt_PP;   // tilde G^H_{AB}
    Mat GHt_Pv;   // tilde G^H_{Aa}
    Mat GHt_vv;   // tilde G^H_{ab}
    Mat GH;       // G^H_{AB} built with gamma^{-1}
    Mat h_xx, h_xv, h_vv;
    Mat h_tilde;  // m x m
    Mat h;        // n_x x n_x from G^H
};

struct Projectors {
    Mat Phi;       // Faddeev-Popov matrix K^A_b chi^a_A
    Mat Lambda;    // n_g x n_P
    Mat N_PP;      // N^A_B
    Mat N_vP;      // N^b_B (rows b)
    Mat P_perp;    // projector onto the section tangent along the orbit
    Mat T;         // n_x x n_P
    Mat Pi_PP, Pi_Pv, Pi_vP, Pi_vv;  // horizontal projector blocks
};

// Everything the bundle formulas need at one chart point, evaluated on the
// section Q = Q*(x) with f~ = f.
struct BundlePoint {
    int n_x = 0, n_v = 0, n_g = 0, n_P = 0;
    Vec x, f, Q;
    Mat GP, GP_inv, GV, GV_inv, KP, KV, Qs, chiJ;
    OrbitMetricValue orbit;
    Mat gamma_inv;
    ConnectionValue conn;
    HorizontalMetricValue horiz;
    Mat h_inv;
    Projectors proj;
};

BundlePoint evaluate_bundle(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine = {});

OrbitMetricValue build_orbit_metric(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine = {});
ConnectionValue build_connection(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine = {});
HorizontalMetricValue build_horizontal_metric(const OriginalGeometry& orig, const Vec& y,
                                              const DerivEngine& engine = {});
Projectors build_projectors(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine = {});

// Adapted fields (h~, d, A) as functions of y, compiled from the original data.
AdaptedGeometry compile_adapted(const OriginalGeometry& orig, const DerivEngine& engine = {});

struct BlockMetric {
    Mat frame;          // blockdiag(h~, d) in the horizontal-lift frame
    Mat frame_inv;
    Mat coord;          // coordinate-basis metric at the identity, (x, f, a) blocks
    Mat coord_inv;      // closed-form block inverse
    Mat orbit_space_inv;  // upper-left m x m quadrant of coord_inv
    double roundtrip = 0.0;  // max |coord * coord_inv - I|
};

BlockMetric assemble_block_metric(const AdaptedGeometry& adapted, const Vec& y);

// Coordinate-basis metric on (x, f, a) for a given right-invariant form matrix
// u_bar(a): [[h~ + A^T d A, A^T d u_bar], [u_bar^T d A, u_bar^T d u_bar]].
Mat coordinate_metric(const Mat& h_tilde, const Mat& d, const Mat& A, const Mat& u_bar);

// Full inverse metric at the identity written with h^{ij}, gamma-connection,
// Lambda and N blocks (the original-data form of the inverse).
Mat inverse_metric_from_original(const BundlePoint& bp);

// |det G - det(d) H| / |det G| at the identity; with a chart and a group point
// the (det u_bar)^2 factor is included.
double det_factorization_check(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine = {});
double det_factorization_check(const OriginalGeometry& orig, const Vec& y, const Mat& u_bar,
                               const DerivEngine& engine = {});

struct GateReport {
    double killing = 0.0;       // max relative Lie-derivative residual of G_P
    double v_isometry = 0.0;    // max |e^T G_V + G_V e|
    double brackets = 0.0;      // max residual of [K_a, K_b] - c^g_ab K_g
    double section = 0.0;       // max |chi(Q*(x))|
    double fp_cond = 0.0;       // worst condition number of Phi
    double min_d_eig = 0.0;     // smallest eigenvalue of d seen
    bool pass = false;
};

GateReport validate_original(const OriginalGeometry& orig, const std::vector<Vec>& points,
                             const DerivEngine& engine = {}, double killing_tol = 1e-6);

}  // namespace bcl
