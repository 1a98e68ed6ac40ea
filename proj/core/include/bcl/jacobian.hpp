// jacobian.hpp - reduction Jacobian, second fundamental form of the orbit,
// Killing-field identities and the reduced Hamiltonian potential
#pragma once

#include <array>

#include "bcl/bundle.hpp"
#include "bcl/curvature.hpp"

namespace bcl {

// sigma = ln det d over the (x, f) chart with its gradient and Hessian.
struct SigmaField {
    double sigma = 0.0;
    Vec grad;
    Mat hess;
};

SigmaField sigma_field(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine, bool hessian = true);

struct LnDetTerms {
    double lap = 0.0;   // Laplacian of ln d on (M~, h~)
    double grad = 0.0;  // 1/4 h~^{AB} s_A s_B
};

LnDetTerms ln_det_terms(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

double jacobian_direct(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

// The quadratic form <ds, ds> written with h^{ij}, the gamma connection,
// gamma^{-1} and G_V^{-1}; compared against the h~^{-1} contraction.
struct QuadraticFormCheck {
    double written_out = 0.0;
    double block_inverse = 0.0;
};
QuadraticFormCheck quadratic_form_written_out(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                              const DerivEngine& engine);

// R_P - R_M - R_G - FF - DdDd with R_P from the general-formula Ricci contraction.
double jacobian_geometric(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);
double jacobian_geometric(const CurvatureBreakdown& b, double R_P);

struct KillingDerivative {
    Vec P;  // (nabla_{K_a} K_b)^C on P
    Vec V;  // (nabla_{K_a} K_b)^c on V
};

KillingDerivative covariant_derivative_killing(const OriginalGeometry& orig, const Vec& Q, const Vec& f, int alpha,
                                               int beta, const DerivEngine& engine);

struct IdentityResiduals {
    double plain_P = 0.0;
    double plain_V = 0.0;
    double adapted_Q = 0.0;  // ident_Q_ast form
    double adapted_f = 0.0;  // ident_f_tild form
    double max() const;
};

IdentityResiduals appendixC_identities_check(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                             const DerivEngine& engine);

// j(B', alpha, beta): coefficient of H_{B'} in j_{alpha beta}.
struct SecondFundamentalForm {
    Tensor j;
    double asymmetry() const;
};

SecondFundamentalForm second_fundamental_form(const FramePoint& fp);
SecondFundamentalForm second_fundamental_form(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

// The four projections j(1)..j(4): raw formulas from the original data
// against the closed forms in D d. Shapes: (n_x | n_v, n_g, n_g).
struct JProjections {
    std::array<Tensor, 4> raw;
    std::array<Tensor, 4> closed;
    std::array<double, 4> residual{};
    double max_residual() const;
};

JProjections j_projections(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                           const DerivEngine& engine);

// max |Pi K_phi| over both sectors of the horizontal projector.
double projector_identity_residual(const BundlePoint& bp);

double j_norm_squared(const FramePoint& fp);
double j_norm_squared(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

struct HamiltonianParams {
    double hbar = 1.0;
    double mass = 1.0;
    double kappa = 1.0;
};

struct HamiltonianTerms {
    double bracket = 0.0;              // R_P - R_M - R_G - FF - |j|^2
    double geometric_potential = 0.0;  // hbar^2 / 8m * bracket
    double generator_term = 0.0;       // -(hbar kappa / 8m) J
    double potential = 0.0;            // V~
    double total = 0.0;                // geometric_potential + V~
};

HamiltonianTerms hamiltonian_terms(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine,
                                   const HamiltonianParams& params, double potential);

}  // namespace bcl
