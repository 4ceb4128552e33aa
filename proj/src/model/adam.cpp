#include "model/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace hmmvae::model {

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (lr < 0.0) throw std::invalid_argument("adam: negative learning rate");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw std::invalid_argument("adam: moment decays must lie in [0, 1)");
  if (eps <= 0.0) throw std::invalid_argument("adam: epsilon must be positive");
}

void Adam::attach(std::vector<ad::Tensor> params) {
  params_ = std::move(params);
  t_ = 0;
  m_.assign(params_.size(), {});
  v_.assign(params_.size(), {});
  for (std::size_t i = 0; i < params_.size(); ++i) {
    m_[i].assign(params_[i].numel(), 0.0);
    v_[i].assign(params_[i].numel(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const std::vector<double> g = params_[i].grad();
    auto& value = params_[i].mutable_value();
    for (std::size_t k = 0; k < value.size(); ++k) {
      m_[i][k] = beta1_ * m_[i][k] + (1.0 - beta1_) * g[k];
      v_[i][k] = beta2_ * v_[i][k] + (1.0 - beta2_) * g[k] * g[k];
      const double m_hat = m_[i][k] / bc1;
      const double v_hat = v_[i][k] / bc2;
      value[k] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

void Adam::zero_grads() {
  for (auto& p : params_) p.zero_grad();
}

void Adam::restore(std::vector<std::vector<double>> m, std::vector<std::vector<double>> v,
                   std::size_t steps) {
  if (m.size() != params_.size() || v.size() != params_.size())
    throw std::invalid_argument("adam: moment buffers disagree with parameter list");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (m[i].size() != params_[i].numel() || v[i].size() != params_[i].numel())
      throw std::invalid_argument("adam: moment buffer size mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = steps;
}

}  // namespace hmmvae::model
