#pragma once

#include <cstddef>
#include <vector>

#include "ad/tensor.hpp"
#include "common/mat.hpp"
#include "common/rng.hpp"

namespace hmmvae::model {

// Feed-forward map with tanh hidden layers and a linear output layer.
// weights[l] has shape [widths[l], widths[l+1]]; a single layer (no hidden
// widths) is a plain affine map.
struct Mlp {
  std::vector<ad::Tensor> weights;
  std::vector<ad::Tensor> biases;

  std::size_t input_dim() const { return weights.front().shape()[0]; }
  std::size_t output_dim() const { return weights.back().shape()[1]; }
  std::vector<ad::Tensor> trainable() const;
};

// widths must include input and output dims (at least 2 entries); weights
// are drawn N(0, 1/fan_in), biases start at zero
Mlp make_mlp(const std::vector<std::size_t>& widths, Rng& rng);

// row-wise application: x has shape [T, input_dim], result [T, output_dim]
ad::Tensor apply_mlp(const Mlp& m, const ad::Tensor& x);

// tape-free convenience for evaluation: wraps the matrix in a constant tensor
Mat apply_mlp_values(const Mlp& m, const Mat& x);

}  // namespace hmmvae::model
