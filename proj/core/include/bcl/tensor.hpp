// tensor.hpp - small dense row-major arrays of arbitrary rank
#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace bcl {

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, double fill = 0.0);

    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int slot) const { return shape_[static_cast<std::size_t>(slot)]; }
    const std::vector<int>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator()(int i) { return data_[static_cast<std::size_t>(i)]; }
    double operator()(int i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator()(int i, int j) { return data_[offset2(i, j)]; }
    double operator()(int i, int j) const { return data_[offset2(i, j)]; }
    double& operator()(int i, int j, int k) { return data_[offset3(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[offset3(i, j, k)]; }
    double& operator()(int i, int j, int k, int l) { return data_[offset4(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return data_[offset4(i, j, k, l)]; }

    double& at(const std::vector<int>& idx) { return data_[flat(idx)]; }
    double at(const std::vector<int>& idx) const { return data_[flat(idx)]; }

    std::size_t flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(std::size_t pos) const;

    double max_abs() const;
    Tensor& operator+=(const Tensor& other);
    Tensor& operator-=(const Tensor& other);
    Tensor& operator*=(double s);

private:
    std::size_t offset2(int i, int j) const {
        return static_cast<std::size_t>(i) * stride_[0] + static_cast<std::size_t>(j);
    }
    std::size_t offset3(int i, int j, int k) const {
        return static_cast<std::size_t>(i) * stride_[0] + static_cast<std::size_t>(j) * stride_[1] +
               static_cast<std::size_t>(k);
    }
    std::size_t offset4(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(i) * stride_[0] + static_cast<std::size_t>(j) * stride_[1] +
               static_cast<std::size_t>(k) * stride_[2] + static_cast<std::size_t>(l);
    }

    std::vector<int> shape_;
    std::vector<std::size_t> stride_;
    std::vector<double> data_;
};

Tensor operator-(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace bcl
