#include "flow/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "ad/ops.hpp"

namespace hmmvae::flow {

using ad::Tensor;

FlowParams FlowParams::identity(std::size_t layers) {
  if (layers == 0) throw std::invalid_argument("flow: at least one layer required");
  FlowParams p;
  p.skew = Tensor::param({layers}, std::vector<double>(layers, 0.0));
  p.tail_raw = Tensor::param({layers},
                             std::vector<double>(layers, raw_from_tail_weight(1.0)));
  return p;
}

double FlowParams::raw_from_tail_weight(double delta) {
  if (delta <= kMinTailWeight)
    throw std::invalid_argument("flow: tail weight must exceed " + std::to_string(kMinTailWeight));
  // inverse of softplus: log(exp(y) - 1)
  return std::log(std::expm1(delta - kMinTailWeight));
}

ad::Tensor tail_weight(const FlowParams& p, std::size_t layer) {
  return ad::softplus(ad::element(p.tail_raw, layer)) + kMinTailWeight;
}

ad::Tensor flow_forward(const FlowParams& p, const ad::Tensor& x) {
  Tensor out = x;
  for (std::size_t l = 0; l < p.layers(); ++l) {
    Tensor gamma = ad::element(p.skew, l);
    Tensor delta = tail_weight(p, l);
    out = ad::sinh(ad::mul(delta, ad::asinh(out)) + gamma);
  }
  return out;
}

std::pair<ad::Tensor, ad::Tensor> flow_inverse_with_logdet(const FlowParams& p,
                                                           const ad::Tensor& u) {
  Tensor x = u;
  Tensor log_det = Tensor::zeros(u.shape());
  for (std::size_t li = p.layers(); li-- > 0;) {
    Tensor gamma = ad::element(p.skew, li);
    Tensor delta = tail_weight(p, li);
    Tensor z = ad::div(ad::asinh(x) - gamma, delta);
    // d/dy sinh((asinh(y)-gamma)/delta) = cosh(z) / (delta * sqrt(1+y^2))
    log_det = log_det + ad::log(ad::cosh(z)) - ad::log(delta) -
              0.5 * ad::log(1.0 + ad::square(x));
    x = ad::sinh(z);
  }
  return {x, log_det};
}

double sash_forward(double x, double gamma, double delta) {
  return std::sinh(delta * std::asinh(x) + gamma);
}

double sash_inverse(double u, double gamma, double delta) {
  return std::sinh((std::asinh(u) - gamma) / delta);
}

}  // namespace hmmvae::flow
