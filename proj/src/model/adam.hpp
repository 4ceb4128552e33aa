#pragma once

#include <cstddef>
#include <vector>

#include "ad/tensor.hpp"

namespace hmmvae::model {

// First-order adaptive-moment optimizer with bias correction. Holds shared
// handles to the parameter tensors it updates, so one step() mutates the
// same storage the next forward pass reads.
class Adam {
 public:
  Adam() = default;
  Adam(double lr, double beta1, double beta2, double eps);

  // registers the full parameter list and resets the moment buffers
  void attach(std::vector<ad::Tensor> params);

  // applies one update from the gradients currently stored on the tensors
  void step();

  // clears gradients on every attached tensor
  void zero_grads();

  std::size_t size() const { return params_.size(); }
  const std::vector<ad::Tensor>& params() const { return params_; }
  std::size_t steps_taken() const { return t_; }
  double learning_rate() const { return lr_; }

  // checkpoint plumbing: moment buffers in attach order
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void restore(std::vector<std::vector<double>> m, std::vector<std::vector<double>> v,
               std::size_t steps);

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<ad::Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace hmmvae::model
