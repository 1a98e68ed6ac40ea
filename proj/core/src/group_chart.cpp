#include "bcl/group_chart.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "bcl/errors.hpp"

namespace bcl {

GroupChart::GroupChart(std::vector<Mat> generators, double max_norm)
    : n_g_(static_cast<int>(generators.size())), max_norm_(max_norm), gens_(std::move(generators)) {
    if (n_g_ == 0) throw ShapeError("group chart needs at least one generator");
    const Eigen::Index k = gens_[0].rows();
    Mat basis(k * k, n_g_);
    for (int a = 0; a < n_g_; ++a) {
        if (gens_[static_cast<std::size_t>(a)].rows() != k || gens_[static_cast<std::size_t>(a)].cols() != k)
            throw ShapeError("generators must share one square shape");
        basis.col(a) = flatten(gens_[static_cast<std::size_t>(a)]);
    }
    Eigen::ColPivHouseholderQR<Mat> qr(basis);
    if (qr.rank() != n_g_) throw ShapeError("generators are linearly dependent");
    basis_pinv_ = qr.solve(Mat::Identity(k * k, k * k));
}

GroupChart GroupChart::abelian(int n) {
    GroupChart g;
    g.n_g_ = n;
    g.max_norm_ = std::numeric_limits<double>::infinity();
    g.abelian_ = true;
    return g;
}

void GroupChart::check_domain(const Vec& a) const {
    if (a.size() != n_g_) throw ShapeError("group point has wrong length");
    if (!(a.norm() < max_norm_)) throw ChartDomainError("group point outside the canonical chart");
}

Vec GroupChart::coordinates(const Mat& algebra_element) const {
    return basis_pinv_ * flatten(algebra_element);
}

Mat GroupChart::element(const Vec& a) const {
    check_domain(a);
    if (abelian_) return Mat::Identity(n_g_, n_g_);
    Mat X = Mat::Zero(gens_[0].rows(), gens_[0].cols());
    for (int k = 0; k < n_g_; ++k) X += a(k) * gens_[static_cast<std::size_t>(k)];
    return X.exp();
}

GroupFrames GroupChart::frames(const Vec& a) const {
    check_domain(a);
    GroupFrames fr;
    if (abelian_) {
        const Mat I = Mat::Identity(n_g_, n_g_);
        fr.u = fr.v = fr.u_bar = fr.v_bar = fr.rho = fr.rho_bar = I;
        return fr;
    }
    const Eigen::Index k = gens_[0].rows();
    Mat X = Mat::Zero(k, k);
    for (int j = 0; j < n_g_; ++j) X += a(j) * gens_[static_cast<std::size_t>(j)];
    const Mat g = X.exp();
    const Mat g_inv = (-X).exp();
    fr.u.resize(n_g_, n_g_);
    fr.u_bar.resize(n_g_, n_g_);
    for (int j = 0; j < n_g_; ++j) {
        // Frechet derivative of exp at X along T_j from the block-triangular exponential.
        Mat big = Mat::Zero(2 * k, 2 * k);
        big.topLeftCorner(k, k) = X;
        big.bottomRightCorner(k, k) = X;
        big.topRightCorner(k, k) = gens_[static_cast<std::size_t>(j)];
        const Mat dg = big.exp().topRightCorner(k, k);
        fr.u_bar.col(j) = coordinates(dg * g_inv);
        fr.u.col(j) = coordinates(g_inv * dg);
    }
    fr.v = fr.u.inverse();
    fr.v_bar = fr.u;
    fr.rho = fr.u_bar * fr.v;
    fr.rho_bar = fr.rho.inverse();
    return fr;
}

std::vector<Mat> so3_generators() {
    std::vector<Mat> t(3, Mat::Zero(3, 3));
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        t[static_cast<std::size_t>(k)](i, j) = -1.0;
        t[static_cast<std::size_t>(k)](j, i) = 1.0;
    }
    return t;
}

}  // namespace bcl
