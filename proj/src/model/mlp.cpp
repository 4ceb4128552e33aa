#include "model/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "ad/ops.hpp"

namespace hmmvae::model {

std::vector<ad::Tensor> Mlp::trainable() const {
  std::vector<ad::Tensor> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back(weights[l]);
    out.push_back(biases[l]);
  }
  return out;
}

Mlp make_mlp(const std::vector<std::size_t>& widths, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need input and output widths");
  for (std::size_t w : widths)
    if (w == 0) throw std::invalid_argument("make_mlp: zero-width layer");
  Mlp m;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l], fan_out = widths[l + 1];
    std::vector<double> w(fan_in * fan_out);
    const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& x : w) x = rng.normal(0.0, stddev);
    m.weights.push_back(ad::Tensor::param({fan_in, fan_out}, std::move(w)));
    m.biases.push_back(ad::Tensor::param({fan_out}, std::vector<double>(fan_out, 0.0)));
  }
  return m;
}

ad::Tensor apply_mlp(const Mlp& m, const ad::Tensor& x) {
  if (m.weights.empty()) throw std::invalid_argument("apply_mlp: empty network");
  if (x.rank() != 2 || x.shape()[1] != m.input_dim())
    throw std::invalid_argument("apply_mlp: input has wrong column count");
  ad::Tensor h = x;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    h = ad::matmul(h, m.weights[l]) + m.biases[l];
    if (l + 1 < m.weights.size()) h = ad::tanh(h);
  }
  return h;
}

Mat apply_mlp_values(const Mlp& m, const Mat& x) {
  const ad::Tensor in = ad::Tensor::constant({x.rows, x.cols}, x.d);
  const ad::Tensor out = apply_mlp(m, in);
  Mat result(x.rows, m.output_dim());
  result.d = out.value();
  return result;
}

}  // namespace hmmvae::model
