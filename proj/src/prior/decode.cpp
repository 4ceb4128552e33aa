#include "prior/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmmvae::prior {

namespace {

struct ChainLogs {
  std::vector<double> log_init;  // [K]
  std::vector<double> log_trans; // [K*K], row-major log P(a -> b)
};

ChainLogs chain_logs(const ad::Tensor& init_logits, const ad::Tensor& trans_logits,
                     std::size_t k) {
  if (init_logits.numel() != k || trans_logits.numel() != k * k)
    throw std::invalid_argument("decode: chain parameter shapes disagree with local scores");
  ChainLogs c;
  c.log_init = init_logits.value();
  {
    double m = *std::max_element(c.log_init.begin(), c.log_init.end());
    double acc = 0.0;
    for (double v : c.log_init) acc += std::exp(v - m);
    const double lse = m + std::log(acc);
    for (auto& v : c.log_init) v -= lse;
  }
  c.log_trans = trans_logits.value();
  for (std::size_t r = 0; r < k; ++r) {
    double m = c.log_trans[r * k];
    for (std::size_t b = 1; b < k; ++b) m = std::max(m, c.log_trans[r * k + b]);
    double acc = 0.0;
    for (std::size_t b = 0; b < k; ++b) acc += std::exp(c.log_trans[r * k + b] - m);
    const double lse = m + std::log(acc);
    for (std::size_t b = 0; b < k; ++b) c.log_trans[r * k + b] -= lse;
  }
  return c;
}

double logsumexp_vec(const double* v, std::size_t n) {
  double m = v[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, v[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

}  // namespace

std::vector<int> viterbi(const ad::Tensor& local, const ad::Tensor& init_logits,
                         const ad::Tensor& trans_logits) {
  if (local.rank() != 2 || local.numel() == 0)
    throw std::invalid_argument("viterbi: local scores must be a non-empty [T,K]");
  const std::size_t t_len = local.shape()[0], k = local.shape()[1];
  const ChainLogs c = chain_logs(init_logits, trans_logits, k);
  const auto& lv = local.value();

  std::vector<double> score(t_len * k);
  std::vector<std::size_t> from((t_len > 1 ? t_len - 1 : 0) * k, 0);
  for (std::size_t j = 0; j < k; ++j) score[j] = c.log_init[j] + lv[j];
  for (std::size_t t = 1; t < t_len; ++t)
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t arg = 0;
      double best = score[(t - 1) * k] + c.log_trans[j];
      for (std::size_t a = 1; a < k; ++a) {
        const double v = score[(t - 1) * k + a] + c.log_trans[a * k + j];
        if (v > best) {  // strict, so ties keep the lowest previous state
          best = v;
          arg = a;
        }
      }
      score[t * k + j] = lv[t * k + j] + best;
      from[(t - 1) * k + j] = arg;
    }

  std::size_t cur = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (score[(t_len - 1) * k + j] > score[(t_len - 1) * k + cur]) cur = j;
  std::vector<int> path(t_len);
  path[t_len - 1] = static_cast<int>(cur) + 1;
  for (std::size_t t = t_len - 1; t-- > 0;) {
    cur = from[t * k + cur];
    path[t] = static_cast<int>(cur) + 1;
  }
  return path;
}

Mat forward_backward(const ad::Tensor& local, const ad::Tensor& init_logits,
                     const ad::Tensor& trans_logits) {
  if (local.rank() != 2 || local.numel() == 0)
    throw std::invalid_argument("forward_backward: local scores must be a non-empty [T,K]");
  const std::size_t t_len = local.shape()[0], k = local.shape()[1];
  const ChainLogs c = chain_logs(init_logits, trans_logits, k);
  const auto& lv = local.value();

  std::vector<double> fwd(t_len * k), bwd(t_len * k), work(k);
  for (std::size_t j = 0; j < k; ++j) fwd[j] = c.log_init[j] + lv[j];
  for (std::size_t t = 1; t < t_len; ++t)
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t a = 0; a < k; ++a) work[a] = fwd[(t - 1) * k + a] + c.log_trans[a * k + j];
      fwd[t * k + j] = lv[t * k + j] + logsumexp_vec(work.data(), k);
    }
  for (std::size_t j = 0; j < k; ++j) bwd[(t_len - 1) * k + j] = 0.0;
  for (std::size_t t = t_len - 1; t-- > 0;)
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b)
        work[b] = c.log_trans[a * k + b] + lv[(t + 1) * k + b] + bwd[(t + 1) * k + b];
      bwd[t * k + a] = logsumexp_vec(work.data(), k);
    }

  Mat marg(t_len, k);
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t j = 0; j < k; ++j) work[j] = fwd[t * k + j] + bwd[t * k + j];
    const double z = logsumexp_vec(work.data(), k);
    for (std::size_t j = 0; j < k; ++j) marg(t, j) = std::exp(work[j] - z);
  }
  return marg;
}

}  // namespace hmmvae::prior
