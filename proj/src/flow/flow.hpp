#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ad/tensor.hpp"

namespace hmmvae::flow {

// Tail weights are kept strictly positive through a softplus with this floor,
// so the flow stays invertible for any raw parameter value.
constexpr double kMinTailWeight = 1e-3;

// One elementwise monotone flow: a stack of sinh-arcsinh layers
//   x -> sinh(delta_l * asinh(x) + gamma_l),
// parameterized by an unconstrained skew (gamma) and a raw tail weight with
// delta_l = softplus(raw_l) + kMinTailWeight.
struct FlowParams {
  ad::Tensor skew;      // [L]
  ad::Tensor tail_raw;  // [L]

  std::size_t layers() const { return skew.numel(); }

  // parameters for which every layer is (numerically) the identity map
  static FlowParams identity(std::size_t layers);

  // raw value whose softplus-plus-floor equals the given tail weight
  static double raw_from_tail_weight(double delta);
};

// layer tail weight as a differentiable scalar tensor
ad::Tensor tail_weight(const FlowParams& p, std::size_t layer);

// applies the layers in order (elementwise over any shape)
ad::Tensor flow_forward(const FlowParams& p, const ad::Tensor& x);

// Inverts the stack (layers applied in reverse) and accumulates the
// elementwise log-derivative of the inverse map. Returns {eps, log_det}.
std::pair<ad::Tensor, ad::Tensor> flow_inverse_with_logdet(const FlowParams& p,
                                                           const ad::Tensor& u);

// plain scalar versions with explicit parameters (used by the generator)
double sash_forward(double x, double gamma, double delta);
double sash_inverse(double u, double gamma, double delta);

}  // namespace hmmvae::flow
