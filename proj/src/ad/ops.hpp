#pragma once

#include <vector>

#include "ad/tensor.hpp"

namespace hmmvae::ad {

// Elementwise unary ops. Domain violations (log of a non-positive value,
// sqrt of a negative) raise std::domain_error instead of propagating NaNs.
Tensor neg(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sinh(const Tensor& a);
Tensor asinh(const Tensor& a);
Tensor cosh(const Tensor& a);
Tensor softplus(const Tensor& a);  // max(x,0) + log1p(exp(-|x|))

// Elementwise binary ops. Shapes must match exactly, or one operand's shape
// must be a trailing suffix of the other's (that operand is repeated along
// the leading axes). Division by an exact zero raises std::domain_error.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

// rank-2 linear algebra
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// reductions (whole tensor or along one axis)
Tensor sum(const Tensor& a);
Tensor sum(const Tensor& a, std::size_t axis);
Tensor mean(const Tensor& a);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor max(const Tensor& a);
Tensor max(const Tensor& a, std::size_t axis);
// stable log(sum(exp(.))) along one axis; gradient is the softmax
Tensor logsumexp(const Tensor& a, std::size_t axis);

// structural ops
Tensor reshape(const Tensor& a, Shape shape);
Tensor row(const Tensor& a, std::size_t r);    // rank-2 -> rank-1
Tensor col(const Tensor& a, std::size_t c);    // rank-2 -> rank-1
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);  // leading axis
Tensor concat(const Tensor& a, const Tensor& b);       // rank-1
Tensor stack_cols(const std::vector<Tensor>& cols);    // K vectors [T] -> [T,K]
Tensor element(const Tensor& a, std::size_t flat_index);  // -> rank-0

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, Tensor::scalar(b)); }
inline Tensor operator+(double a, const Tensor& b) { return add(Tensor::scalar(a), b); }
inline Tensor operator-(const Tensor& a, double b) { return sub(a, Tensor::scalar(b)); }
inline Tensor operator-(double a, const Tensor& b) { return sub(Tensor::scalar(a), b); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, Tensor::scalar(b)); }
inline Tensor operator*(double a, const Tensor& b) { return mul(Tensor::scalar(a), b); }
inline Tensor operator/(const Tensor& a, double b) { return div(a, Tensor::scalar(b)); }
inline Tensor operator/(double a, const Tensor& b) { return div(Tensor::scalar(a), b); }

}  // namespace hmmvae::ad
