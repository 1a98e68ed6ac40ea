#include "bcl/fields.hpp"

#include <cmath>
#include <sstream>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

std::vector<double> to_std(const Vec& y) { return {y.data(), y.data() + y.size()}; }

void require_finite(const Mat& value, const Vec& y) {
    if (!value.allFinite()) throw EvaluationError("non-finite field value inside stencil", to_std(y));
}

Vec eval_checked(const VecFn& fn, const Vec& y) {
    Vec v = fn(y);
    require_finite(v, y);
    return v;
}

Vec central(const VecFn& fn, const Vec& y, int slot, double h) {
    Vec yp = y, ym = y;
    yp(slot) += h;
    ym(slot) -= h;
    return (eval_checked(fn, yp) - eval_checked(fn, ym)) / (2.0 * h);
}

Vec pure_second(const VecFn& fn, const Vec& y, int slot, double h, const Vec& f0) {
    Vec yp = y, ym = y;
    yp(slot) += h;
    ym(slot) -= h;
    return (eval_checked(fn, yp) - 2.0 * f0 + eval_checked(fn, ym)) / (h * h);
}

Vec mixed_second(const VecFn& fn, const Vec& y, int s1, int s2, double h1, double h2) {
    auto at = [&](double a, double b) {
        Vec z = y;
        z(s1) += a;
        z(s2) += b;
        return eval_checked(fn, z);
    };
    return (at(h1, h2) - at(h1, -h2) - at(-h1, h2) + at(-h1, -h2)) / (4.0 * h1 * h2);
}

VecFn as_vecfn(const FieldHandle& field) {
    return [&field](const Vec& y) { return flatten(field(y)); };
}

}  // namespace

Vec ChartPoint::joined() const {
    Vec y(x.size() + f.size());
    y << x, f;
    return y;
}

ChartPoint ChartPoint::split(const Vec& y, int n_x) {
    if (n_x < 0 || n_x > y.size()) throw ShapeError("chart split outside vector length");
    return {y.head(n_x), y.tail(y.size() - n_x)};
}

void DerivEngine::validate() const {
    if (!(fd_step > 0.0 && fd_step < 1e-2)) {
        std::ostringstream os;
        os << "fd_step must lie in (0, 1e-2), got " << fd_step;
        throw ConfigError(os.str(), "fd_step");
    }
}

double DerivEngine::step_for(double coordinate) const { return fd_step * (1.0 + std::abs(coordinate)); }

double DerivEngine::second_step_for(double coordinate) const {
    return 0.3 * std::sqrt(fd_step) * (1.0 + std::abs(coordinate));
}

DerivEngine DerivEngine::outer() const {
    DerivEngine e = *this;
    e.fd_step = 2.0 * std::sqrt(fd_step);
    return e;
}

Mat FieldHandle::operator()(const Vec& y) const {
    Mat v = eval(y);
    if (v.rows() != rows || v.cols() != cols) {
        std::ostringstream os;
        os << "field returned " << v.rows() << "x" << v.cols() << ", declared " << rows << "x" << cols;
        throw ShapeError(os.str());
    }
    return v;
}

FieldHandle make_field(int rows, int cols, std::function<Mat(const Vec&)> eval,
                       std::function<std::vector<Mat>(const Vec&)> deriv) {
    FieldHandle h;
    h.arity = (rows == 1 && cols == 1) ? Arity::Scalar : (cols == 1 ? Arity::Vector : Arity::Matrix);
    h.rows = rows;
    h.cols = cols;
    h.eval = std::move(eval);
    h.deriv = std::move(deriv);
    return h;
}

Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unflatten(const Vec& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols) throw ShapeError("unflatten size mismatch");
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Vec fd_partial(const DerivEngine& engine, const VecFn& fn, const Vec& y, int slot) {
    if (slot < 0 || slot >= y.size()) throw ShapeError("derivative slot out of range");
    const double h = engine.step_for(y(slot));
    Vec d1 = central(fn, y, slot, h);
    if (!engine.richardson) return d1;
    Vec d2 = central(fn, y, slot, 0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

Mat fd_jacobian(const DerivEngine& engine, const VecFn& fn, const Vec& y) {
    Mat jac;
    for (int s = 0; s < y.size(); ++s) {
        Vec col = fd_partial(engine, fn, y, s);
        if (s == 0) jac.resize(col.size(), y.size());
        jac.col(s) = col;
    }
    if (y.size() == 0) jac.resize(eval_checked(fn, y).size(), 0);
    return jac;
}

Vec fd_second(const DerivEngine& engine, const VecFn& fn, const Vec& y, int s1, int s2) {
    if (s1 < 0 || s2 < 0 || s1 >= y.size() || s2 >= y.size()) throw ShapeError("derivative slot out of range");
    if (s1 == s2) {
        const double h = engine.second_step_for(y(s1));
        Vec f0 = eval_checked(fn, y);
        Vec d1 = pure_second(fn, y, s1, h, f0);
        if (!engine.richardson) return d1;
        Vec d2 = pure_second(fn, y, s1, 0.5 * h, f0);
        return (4.0 * d2 - d1) / 3.0;
    }
    // Fixed slot order keeps the stencil identical for (s1,s2) and (s2,s1).
    const int a = std::min(s1, s2), b = std::max(s1, s2);
    const double h1 = engine.second_step_for(y(a)), h2 = engine.second_step_for(y(b));
    Vec d1 = mixed_second(fn, y, a, b, h1, h2);
    if (!engine.richardson) return d1;
    Vec d2 = mixed_second(fn, y, a, b, 0.5 * h1, 0.5 * h2);
    return (4.0 * d2 - d1) / 3.0;
}

Mat partial(const DerivEngine& engine, const FieldHandle& field, const Vec& y, int slot) {
    if (slot < 0 || slot >= y.size()) throw ShapeError("derivative slot out of range");
    if (engine.mode == DerivMode::AnalyticIfAvailable && field.has_analytic()) {
        auto all = field.deriv(y);
        return all.at(static_cast<std::size_t>(slot));
    }
    return unflatten(fd_partial(engine, as_vecfn(field), y, slot), field.rows, field.cols);
}

std::vector<Mat> gradient(const DerivEngine& engine, const FieldHandle& field, const Vec& y) {
    if (engine.mode == DerivMode::AnalyticIfAvailable && field.has_analytic()) {
        auto all = field.deriv(y);
        if (static_cast<Eigen::Index>(all.size()) != y.size())
            throw ShapeError("analytic derivative returned wrong slot count");
        return all;
    }
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(y.size()));
    auto fn = as_vecfn(field);
    for (int s = 0; s < y.size(); ++s) out.push_back(unflatten(fd_partial(engine, fn, y, s), field.rows, field.cols));
    return out;
}

Mat second_partial(const DerivEngine& engine, const FieldHandle& field, const Vec& y, int s1, int s2) {
    if (engine.mode == DerivMode::AnalyticIfAvailable && field.has_analytic()) {
        // Differentiate the analytic first derivative once more.
        VecFn fn = [&field, s1](const Vec& z) { return flatten(field.deriv(z).at(static_cast<std::size_t>(s1))); };
        return unflatten(fd_partial(engine, fn, y, s2), field.rows, field.cols);
    }
    return unflatten(fd_second(engine, as_vecfn(field), y, s1, s2), field.rows, field.cols);
}

SpdInverse invert_spd(const Mat& m, double max_cond) {
    if (m.rows() != m.cols()) throw ShapeError("invert_spd needs a square matrix");
    SpdInverse out;
    const Eigen::Index n = m.rows();
    if (n == 0) {
        out.inverse = Mat(0, 0);
        return out;
    }
    if (!m.allFinite()) throw SingularMatrixError("matrix has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw SingularMatrixError("matrix is not symmetric within 1e-10");
    Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(n - 1);
    if (!(lo > 0.0)) throw SingularMatrixError("matrix is not positive definite");
    out.cond = hi / lo;
    if (out.cond > max_cond) {
        std::ostringstream os;
        os << "near-singular matrix, condition number " << out.cond;
        throw SingularMatrixError(os.str());
    }
    Eigen::LLT<Mat> llt(sym);
    if (llt.info() != Eigen::Success) throw SingularMatrixError("Cholesky factorization failed");
    out.inverse = llt.solve(Mat::Identity(n, n));
    out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
    double logdet = 0.0;
    const Mat& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
    out.det = std::exp(logdet);
    return out;
}

Mat sqrt_psd(const Mat& m, double neg_tol) {
    if (m.rows() != m.cols()) throw ShapeError("sqrt_psd needs a square matrix");
    if (m.rows() == 0) return Mat(0, 0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
    Vec lam = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -neg_tol) throw SingularMatrixError("negative eigenvalue in square root");
        lam(i) = std::sqrt(std::max(0.0, lam(i)));
    }
    const Mat& v = eig.eigenvectors();
    return v * lam.asDiagonal() * v.transpose();
}

}  // namespace bcl
