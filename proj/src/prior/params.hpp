#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ad/tensor.hpp"
#include "common/mat.hpp"
#include "common/rng.hpp"
#include "flow/flow.hpp"

namespace hmmvae::prior {

// the three families of per-state emission models the switching prior supports
enum class Branch {
  kGaussianEmission = 1,  // state-dependent Gaussian level
  kMsar = 2,              // state-switching mean-reverting AR(1)
  kStateFlow = 3,         // AR(1) residual pushed through a per-state monotone flow
};

Branch branch_from_int(int b);
int branch_to_int(Branch b);

// Learnable prior for a single latent dimension. Probabilities live as
// unconstrained logits, variances and scales as log values; the natural
// quantities are recovered with softmax/exp wherever they are consumed.
// Storage is fully disjoint between sources: no tensor here is shared.
struct SourcePriorParams {
  Branch branch = Branch::kGaussianEmission;
  std::size_t num_states = 1;

  ad::Tensor init_logits;   // [K]
  ad::Tensor trans_logits;  // [K,K], row r holds logits of transitions out of state r

  // branch 1
  ad::Tensor emission_means;     // [K]
  ad::Tensor emission_log_vars;  // [K]

  // branches 2 and 3: explicit first-step Gaussian
  ad::Tensor init_means;     // [K]
  ad::Tensor init_log_vars;  // [K]

  // branch 2
  ad::Tensor ar_levels;       // [K] levels the AR step reverts to
  ad::Tensor innov_log_vars;  // [K]

  // branches 2 and 3
  ad::Tensor ar_coeffs;  // [K]

  // branch 3
  ad::Tensor log_scales;  // [K] residual scale per state
  std::vector<flow::FlowParams> state_flows;  // K flows

  // all trainable tensors of this source
  std::vector<ad::Tensor> trainable() const;
};

// default-initialized prior: near-uniform chain logits with a boosted
// self-transition, state means spread evenly over [-1, 1], variances at 0.5,
// AR coefficients at zero, flows at identity
SourcePriorParams make_source_prior(Branch branch, std::size_t num_states, std::size_t flow_layers,
                                    Rng& rng);

// natural-unit view of one source's prior for logging
struct SourceSnapshot {
  int branch = 1;
  std::vector<double> initial;  // softmax of init_logits
  Mat transition;               // row-softmax of trans_logits
  // remaining parameters keyed by role; flow entries are flattened
  // state-major (state 0 layer 0, state 0 layer 1, ...)
  std::vector<std::pair<std::string, std::vector<double>>> payload;
};

SourceSnapshot snapshot_source(const SourcePriorParams& p);

// softmax helpers on raw values (no tape involvement)
std::vector<double> softmax(const std::vector<double>& logits);
Mat row_softmax_mat(const ad::Tensor& logits_kk);

}  // namespace hmmvae::prior
