#include "girnet/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace girnet {

namespace {

Index shape_product(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index d : shape) {
        if (d <= 0) throw DimensionError("tensor dimensions must be positive");
        n *= d;
    }
    return n;
}

} // namespace

Tensor::Tensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    data_ = Eigen::ArrayXd::Zero(shape_product(shape_));
}

Tensor::Tensor(std::vector<Index> shape, std::vector<double> values) : shape_(std::move(shape)) {
    const Index n = shape_product(shape_);
    if (n != static_cast<Index>(values.size()))
        throw DimensionError("tensor shape " + shape_str() + " does not match " +
                             std::to_string(values.size()) + " values");
    data_ = Eigen::Map<const Eigen::ArrayXd>(values.data(), n);
}

Tensor Tensor::ones(std::vector<Index> shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(std::vector<Index> shape, double value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
}

Tensor Tensor::vector(std::vector<double> values) {
    const Index n = static_cast<Index>(values.size());
    return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = r > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
    std::vector<double> values;
    values.reserve(static_cast<size_t>(r * c));
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != c)
            throw DimensionError("ragged initializer for Tensor::matrix");
        values.insert(values.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(values));
}

Index Tensor::rows() const {
    if (rank() == 1) return shape_[0];
    if (rank() == 2) return shape_[0];
    throw DimensionError("no 2-d view of tensor with shape " + shape_str());
}

Index Tensor::cols() const {
    if (rank() == 1) return 1;
    if (rank() == 2) return shape_[1];
    throw DimensionError("no 2-d view of tensor with shape " + shape_str());
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << 'x';
        os << shape_[i];
    }
    os << ']';
    return os.str();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                             b.shape_str());
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2)
        throw DimensionError("matmul: left operand must be 2-d, got " + a.shape_str());
    if (a.cols() != b.rows())
        throw DimensionError("matmul: inner dimensions disagree, " + a.shape_str() + " vs " +
                             b.shape_str());
    Tensor out = b.rank() == 1 ? Tensor({a.rows()}) : Tensor({a.rows(), b.cols()});
    out.mat().noalias() = a.mat() * b.mat();
    return out;
}

Tensor sigmoid(const Tensor& x) {
    Tensor out(x.shape());
    out.flat() = 1.0 / (1.0 + (-x.flat()).exp());
    return out;
}

Tensor tanh(const Tensor& x) {
    Tensor out(x.shape());
    out.flat() = x.flat().tanh();
    return out;
}

Tensor softmax(const Tensor& x) {
    if (x.rank() != 1 || x.size() < 1)
        throw DimensionError("softmax expects a non-empty rank-1 tensor, got " + x.shape_str());
    Tensor out(x.shape());
    const double m = x.flat().maxCoeff();
    out.flat() = (x.flat() - m).exp();
    out.flat() /= out.flat().sum();
    return out;
}

Tensor softmax_columns(const Tensor& x) {
    Tensor out(x.shape());
    auto src = x.mat();
    auto dst = out.mat();
    for (Index c = 0; c < src.cols(); ++c) {
        const double m = src.col(c).maxCoeff();
        dst.col(c) = (src.col(c).array() - m).exp();
        dst.col(c) /= dst.col(c).sum();
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Tensor out(a.shape());
    out.flat() = a.flat() + b.flat();
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Tensor out(a.shape());
    out.flat() = a.flat() - b.flat();
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "hadamard");
    Tensor out(a.shape());
    out.flat() = a.flat() * b.flat();
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out(a.shape());
    out.flat() = a.flat() * c;
    return out;
}

Tensor apply_mask(const Tensor& states, const Tensor& mask) {
    if (states.rows() != mask.size())
        throw DimensionError("apply_mask: " + std::to_string(mask.size()) +
                             " mask entries for states " + states.shape_str());
    for (Index t = 0; t < mask.size(); ++t)
        if (mask[t] != 0.0 && mask[t] != 1.0)
            throw ContractError("apply_mask: mask entries must be 0 or 1");
    Tensor out = states;
    for (Index t = 0; t < mask.size(); ++t)
        if (mask[t] == 0.0) out.mat().row(t).setZero();
    return out;
}

} // namespace girnet
