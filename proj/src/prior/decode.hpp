#pragma once

#include <vector>

#include "ad/tensor.hpp"
#include "common/mat.hpp"
#include "prior/params.hpp"

namespace hmmvae::prior {

// Most likely state path given local scores [T,K] and the source's chain
// logits. Plain max-product dynamic programming on raw values (nothing is
// recorded on a tape). Ties resolve toward the lower state index. Returns
// 1-based labels.
std::vector<int> viterbi(const ad::Tensor& local, const ad::Tensor& init_logits,
                         const ad::Tensor& trans_logits);

// Posterior state marginals by forward-backward smoothing in the log domain;
// rows index time, columns states, each row sums to one
Mat forward_backward(const ad::Tensor& local, const ad::Tensor& init_logits,
                     const ad::Tensor& trans_logits);

}  // namespace hmmvae::prior
