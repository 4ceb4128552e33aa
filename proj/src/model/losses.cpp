#include "model/losses.hpp"

#include <stdexcept>

#include "ad/ops.hpp"
#include "prior/scoring.hpp"

namespace hmmvae::model {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

ad::Tensor reconstruction_loss(const ad::Tensor& target, const ad::Tensor& predicted) {
  if (target.shape() != predicted.shape())
    throw std::invalid_argument("reconstruction_loss: shape mismatch");
  return ad::sum(ad::square(predicted - target));
}

ad::Tensor posterior_log_density(const ad::Tensor& latents, const ad::Tensor& mu,
                                 const ad::Tensor& log_var) {
  if (latents.shape() != mu.shape())
    throw std::invalid_argument("posterior_log_density: latents and means differ in shape");
  if (log_var.rank() != 1 || latents.rank() != 2 || log_var.shape()[0] != latents.shape()[1])
    throw std::invalid_argument("posterior_log_density: need one log-variance per column");
  const ad::Tensor centered = ad::square(latents - mu);
  const ad::Tensor per_entry =
      -0.5 * kLog2Pi - 0.5 * log_var - centered * (0.5 * ad::exp(-log_var));
  return ad::sum(per_entry);
}

Mat draw_noise(std::size_t rows, std::size_t cols, Rng& rng) {
  Mat eps(rows, cols);
  for (auto& x : eps.d) x = rng.normal();
  return eps;
}

ad::Tensor sample_latents(const ad::Tensor& mu, const ad::Tensor& log_var, const Mat& eps) {
  if (mu.rank() != 2 || mu.shape()[0] != eps.rows || mu.shape()[1] != eps.cols)
    throw std::invalid_argument("sample_latents: noise shape mismatch");
  const ad::Tensor noise = ad::Tensor::constant({eps.rows, eps.cols}, eps.d);
  return mu + ad::exp(0.5 * log_var) * noise;
}

LossBreakdown total_loss(const Mat& observations, const Mlp& encoder, const Mlp& decoder,
                         const ad::Tensor& log_var,
                         const std::vector<prior::SourcePriorParams>& priors, double beta,
                         const Mat& noise) {
  if (beta < 0.0) throw std::invalid_argument("total_loss: beta must be non-negative");
  const ad::Tensor y =
      ad::Tensor::constant({observations.rows, observations.cols}, observations.d);

  const ad::Tensor mu = apply_mlp(encoder, y);
  const ad::Tensor latents = sample_latents(mu, log_var, noise);
  const ad::Tensor y_hat = apply_mlp(decoder, latents);

  const ad::Tensor rec = reconstruction_loss(y, y_hat);
  const ad::Tensor logq = posterior_log_density(latents, mu, log_var);
  const ad::Tensor logp = prior::total_prior_logp(latents, priors);

  LossBreakdown out;
  out.latent_mean = mu;
  out.rec = rec.scalar_value();
  out.logq = logq.scalar_value();
  out.logp = logp.scalar_value();
  out.total = beta == 0.0 ? rec : rec + beta * (logq - logp);
  out.total_value = out.total.scalar_value();
  return out;
}

LossBreakdown total_loss(const Mat& observations, const Mlp& encoder, const Mlp& decoder,
                         const ad::Tensor& log_var,
                         const std::vector<prior::SourcePriorParams>& priors, double beta,
                         Rng& rng) {
  const Mat eps = draw_noise(observations.rows, log_var.shape()[0], rng);
  return total_loss(observations, encoder, decoder, log_var, priors, beta, eps);
}

}  // namespace hmmvae::model
