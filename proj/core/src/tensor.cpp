#include "bcl/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/errors.hpp"

namespace bcl {

Tensor::Tensor(std::vector<int> shape, double fill) : shape_(std::move(shape)) {
    std::size_t total = 1;
    stride_.assign(shape_.size(), 1);
    for (std::size_t s = shape_.size(); s-- > 0;) {
        if (shape_[s] < 0) throw ShapeError("negative tensor extent");
        stride_[s] = total;
        total *= static_cast<std::size_t>(shape_[s]);
    }
    data_.assign(total, fill);
}

std::size_t Tensor::flat(const std::vector<int>& idx) const {
    if (idx.size() != shape_.size()) throw ShapeError("index rank does not match tensor rank");
    std::size_t pos = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) pos += static_cast<std::size_t>(idx[s]) * stride_[s];
    return pos;
}

std::vector<int> Tensor::unflat(std::size_t pos) const {
    std::vector<int> idx(shape_.size());
    for (std::size_t s = 0; s < shape_.size(); ++s) {
        idx[s] = static_cast<int>(pos / stride_[s]);
        pos %= stride_[s];
    }
    return idx;
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Tensor& Tensor::operator+=(const Tensor& other) {
    if (other.shape_ != shape_) throw ShapeError("tensor shapes differ in +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    if (other.shape_ != shape_) throw ShapeError("tensor shapes differ in -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    Tensor r = a;
    r -= b;
    return r;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("tensor shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace bcl
