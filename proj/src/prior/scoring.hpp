#pragma once

#include "ad/tensor.hpp"
#include "prior/params.hpp"

namespace hmmvae::prior {

// log N(x; mean, exp(log_var)) elementwise, with the usual broadcast rules
ad::Tensor gaussian_log_density(const ad::Tensor& x, const ad::Tensor& mean,
                                const ad::Tensor& log_var);

// Per-step log densities for one latent trajectory under each state of its
// prior: entry (t, k) is log p(s_t | s_{t-1}, state k). Shape [T, K].
ad::Tensor local_scores(const ad::Tensor& trajectory, const SourcePriorParams& p);

// normalized log initial probabilities from logits; shape [K]
ad::Tensor log_initial(const ad::Tensor& init_logits);
// transposed normalized log transition matrix: out[k][a] = log P(a -> k)
ad::Tensor log_transition_t(const ad::Tensor& trans_logits);

// Total log-likelihood of the trajectory with the hidden states summed out,
// by the forward recursion in the log domain. One fused differentiable node:
// the alphas are computed in plain doubles and the exact softmax weights are
// replayed in the backward pass. Scalar output.
ad::Tensor hmm_forward_logsum(const ad::Tensor& local, const ad::Tensor& log_init,
                              const ad::Tensor& log_trans_t);

// convenience: local scores + forward recursion for one source
ad::Tensor source_log_likelihood(const ad::Tensor& trajectory, const SourcePriorParams& p);

// joint prior log-likelihood of all latent dimensions: latents has shape
// [T, n], column j is scored under priors[j]; contributions add up
ad::Tensor total_prior_logp(const ad::Tensor& latents,
                            const std::vector<SourcePriorParams>& priors);

}  // namespace hmmvae::prior
