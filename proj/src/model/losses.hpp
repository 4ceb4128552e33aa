#pragma once

#include <vector>

#include "ad/tensor.hpp"
#include "common/mat.hpp"
#include "common/rng.hpp"
#include "model/mlp.hpp"
#include "prior/params.hpp"

namespace hmmvae::model {

// sum of squared errors over all entries; shapes must match exactly
ad::Tensor reconstruction_loss(const ad::Tensor& target, const ad::Tensor& predicted);

// sum over entries of log N(s; mu, sigma^2) with per-column log variances
// log_var of shape [n] broadcast across the [T, n] inputs
ad::Tensor posterior_log_density(const ad::Tensor& latents, const ad::Tensor& mu,
                                 const ad::Tensor& log_var);

// standard-normal draws in row-major order, one per latent entry
Mat draw_noise(std::size_t rows, std::size_t cols, Rng& rng);

// reparameterized sample mu + exp(log_var / 2) * eps; the noise enters as a
// constant, so gradients flow only through mu and log_var
ad::Tensor sample_latents(const ad::Tensor& mu, const ad::Tensor& log_var, const Mat& eps);

struct LossBreakdown {
  ad::Tensor total;        // scalar; backward through this drives training
  ad::Tensor latent_mean;  // [T, n] encoder output, for correlation reports
  double total_value = 0.0;
  double rec = 0.0;   // reconstruction component
  double logq = 0.0;  // posterior log-density at the sample
  double logp = 0.0;  // prior log-density at the sample
};

// Single-sample objective rec + beta * (logq - logp) on one full episode.
// The noise matrix fixes the reparameterization draw, making the loss a
// deterministic, differentiable function of all parameters. With beta = 0 the
// returned total is the reconstruction term itself.
LossBreakdown total_loss(const Mat& observations, const Mlp& encoder, const Mlp& decoder,
                         const ad::Tensor& log_var,
                         const std::vector<prior::SourcePriorParams>& priors, double beta,
                         const Mat& noise);

// convenience overload drawing a fresh noise matrix from the stream
LossBreakdown total_loss(const Mat& observations, const Mlp& encoder, const Mlp& decoder,
                         const ad::Tensor& log_var,
                         const std::vector<prior::SourcePriorParams>& priors, double beta,
                         Rng& rng);

}  // namespace hmmvae::model
