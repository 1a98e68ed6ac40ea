// sde.hpp - drift and diffusion of the reduced process and a one-step
// Euler-Maruyama moment check
#pragma once

#include <cstdint>

#include "bcl/bundle.hpp"

namespace bcl {

struct SdeParams {
    double mu2 = 1.0;  // hbar / m
    double kappa = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
    void validate() const;
};

struct ReducedSdeCoeffs {
    Vec b;     // (b^i, b^a)
    Mat X;     // lower block-triangular, X X^T = h~^{-1}
    double H = 0.0;
    Mat h_inv; // h~^{-1}
};

double density_H(const AdaptedGeometry& g, const Vec& y);

// Drift from the original-data displays (h^{ij}, gamma connection, K, N).
Vec drift_coefficients(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine);
// (1/sqrt H) d_B (sqrt H h~^{AB}) by finite differences.
Vec drift_divergence_form(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

// Diffusion blocks from the original data: (h^{ij})^{1/2}, X^k A^mu_k K^a_mu,
// (gamma^{ab} K K + G^{ab})^{1/2}.
Mat diffusion_coefficients(const OriginalGeometry& orig, const Vec& y, const DerivEngine& engine);
// Same lower block-triangular shape built from h~^{-1} only.
Mat diffusion_coefficients(const AdaptedGeometry& g, const Vec& y);

ReducedSdeCoeffs reduced_coefficients(const OriginalGeometry& orig, const AdaptedGeometry& g, const Vec& y,
                                      const DerivEngine& engine);
ReducedSdeCoeffs reduced_coefficients(const AdaptedGeometry& g, const Vec& y, const DerivEngine& engine);

struct MomentReport {
    int n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    Vec mean_expected, mean_sample, mean_se;
    Mat cov_expected, cov_sample, cov_se;
    double max_mean_z = 0.0;  // largest |sample - expected| / se
    double max_cov_z = 0.0;
    double sigma = 4.0;
    bool pass = false;
};

// One Euler-Maruyama step of size dt from the point, repeated over n_paths
// independent paths. Per-path streams are seeded from (seed, path index); the
// reduction runs in fixed chunks so results do not depend on the thread count.
MomentReport euler_maruyama_check(const ReducedSdeCoeffs& coeffs, const SdeParams& params, double dt, int n_paths,
                                  std::uint64_t seed, double stat_sigma = 4.0, int threads = 0);

// Worker count from BCL_THREADS, falling back to the hardware concurrency.
int worker_count();

}  // namespace bcl
