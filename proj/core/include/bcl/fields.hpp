// fields.hpp - field evaluation, finite differences and small SPD algebra
//
// Everything in the engine is a function of the orbit-space chart point
// y = (x, f). Fields return Eigen matrices; scalars are 1x1 and rank-3 values
// are flattened to rows x (cols * depth).
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace bcl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ChartPoint {
    Vec x;
    Vec f;

    Vec joined() const;
    static ChartPoint split(const Vec& y, int n_x);
};

enum class DerivMode { FiniteDifference, AnalyticIfAvailable };

struct DerivEngine {
    double fd_step = 1e-5;
    bool richardson = true;
    DerivMode mode = DerivMode::AnalyticIfAvailable;

    // Throws ConfigError unless fd_step lies in (0, 1e-2).
    void validate() const;

    double step_for(double coordinate) const;
    // Step used by second-derivative stencils. Balances h^4 truncation of the
    // Richardson combination against eps/h^2 cancellation.
    double second_step_for(double coordinate) const;
    // Engine for differentiating quantities that were themselves obtained by
    // finite differences. The inner result carries roughly eps/fd_step of
    // noise, so the outer Richardson step is 2 sqrt(fd_step) (6.3e-3 at the
    // default), near the eps_inner^(1/5) optimum.
    DerivEngine outer() const;
};

enum class Arity { Scalar, Vector, Matrix, Rank3 };
enum class Sector { Base, Vector, Orbit };

struct FieldHandle {
    Arity arity = Arity::Matrix;
    int rows = 1;
    int cols = 1;
    std::vector<Sector> sectors;
    std::function<Mat(const Vec&)> eval;
    // Optional analytic first derivatives, one matrix per chart slot.
    std::function<std::vector<Mat>(const Vec&)> deriv;

    Mat operator()(const Vec& y) const;
    bool has_analytic() const { return static_cast<bool>(deriv); }
};

FieldHandle make_field(int rows, int cols, std::function<Mat(const Vec&)> eval,
                       std::function<std::vector<Mat>(const Vec&)> deriv = {});

Mat partial(const DerivEngine& engine, const FieldHandle& field, const Vec& y, int slot);
std::vector<Mat> gradient(const DerivEngine& engine, const FieldHandle& field, const Vec& y);
Mat second_partial(const DerivEngine& engine, const FieldHandle& field, const Vec& y, int slot1,
                   int slot2);

// Plain-function variants used when no FieldHandle is at hand.
using VecFn = std::function<Vec(const Vec&)>;
Vec fd_partial(const DerivEngine& engine, const VecFn& fn, const Vec& y, int slot);
Mat fd_jacobian(const DerivEngine& engine, const VecFn& fn, const Vec& y);
Vec fd_second(const DerivEngine& engine, const VecFn& fn, const Vec& y, int slot1, int slot2);

Vec flatten(const Mat& m);
Mat unflatten(const Vec& v, int rows, int cols);

struct SpdInverse {
    Mat inverse;
    double det = 1.0;
    double cond = 1.0;
};

// Inverse and determinant of a symmetric positive definite matrix.
// Refuses asymmetric input, indefinite input and condition numbers above max_cond.
SpdInverse invert_spd(const Mat& m, double max_cond = 1e12);

// Symmetric positive semidefinite square root by eigendecomposition.
// Eigenvalues below -neg_tol are an error; small negatives are clamped to 0.
Mat sqrt_psd(const Mat& m, double neg_tol = 1e-12);

}  // namespace bcl
