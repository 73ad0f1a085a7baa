#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <string>
#include <vector>

#include "girnet/errors.hpp"

namespace girnet {

using Index = Eigen::Index;

/// Dense matrices are row-major throughout so that Tensor's flat storage and
/// its 2-d view agree element for element.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense real-valued array with an explicit shape. Rank 1 tensors behave as
/// column vectors in matrix contexts. Storage is a flat row-major array of
/// 64-bit floats backed by Eigen.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<Index> shape);

    Tensor(std::vector<Index> shape, std::vector<double> values);

    static Tensor zeros(std::vector<Index> shape) { return Tensor(std::move(shape)); }
    static Tensor ones(std::vector<Index> shape);
    static Tensor full(std::vector<Index> shape, double value);
    static Tensor scalar(double value) { return Tensor({1}, {value}); }
    static Tensor vector(std::vector<double> values);
    /// 2-d tensor from nested initializer lists (test convenience).
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

    const std::vector<Index>& shape() const { return shape_; }
    Index rank() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return data_.size(); }
    bool empty() const { return data_.size() == 0; }

    /// Rows/cols of the 2-d view; rank-1 tensors are columns, rank-0 forbidden.
    Index rows() const;
    Index cols() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Eigen::Map<Eigen::ArrayXd> flat() { return {data_.data(), data_.size()}; }
    Eigen::Map<const Eigen::ArrayXd> flat() const { return {data_.data(), data_.size()}; }

    Eigen::Map<RowMatrix> mat() { return {data_.data(), rows(), cols()}; }
    Eigen::Map<const RowMatrix> mat() const { return {data_.data(), rows(), cols()}; }

    double& operator[](Index i) { return data_[i]; }
    double operator[](Index i) const { return data_[i]; }
    double& at(Index r, Index c) { return data_[r * cols() + c]; }
    double at(Index r, Index c) const { return data_[r * cols() + c]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const { return data_.allFinite(); }
    void set_zero() { data_.setZero(); }

    std::string shape_str() const;

private:
    std::vector<Index> shape_;
    Eigen::ArrayXd data_;
};

// ---- elementwise / linear-algebra free functions -------------------------

/// Matrix product a[p×q] · b[q×r]. A rank-1 right operand is treated as a
/// column, giving a rank-1 result of length p.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

/// Stable softmax of a rank-1 tensor: positive entries summing to 1.
Tensor softmax(const Tensor& x);

/// Column-wise stable softmax of a 2-d tensor.
Tensor softmax_columns(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// Zeroes every row of `states` [n×d] whose mask entry is 0. Mask entries
/// must be exactly 0 or 1.
Tensor apply_mask(const Tensor& states, const Tensor& mask);

void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

} // namespace girnet
