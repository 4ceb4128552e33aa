#include "prior/scoring.hpp"

#include <cmath>
#include <stdexcept>

#include "ad/ops.hpp"
#include "ad/tape.hpp"

namespace hmmvae::prior {

using ad::Tensor;

namespace {
const double kLog2Pi = std::log(2.0 * M_PI);
}

Tensor gaussian_log_density(const Tensor& x, const Tensor& mean, const Tensor& log_var) {
  Tensor d = x - mean;
  return -0.5 * (ad::square(d) * ad::exp(-log_var) + log_var + kLog2Pi);
}

namespace {

// branch 1: state-dependent Gaussian level at every step
Tensor scores_gaussian_emission(const Tensor& s, const SourcePriorParams& p) {
  std::vector<Tensor> cols;
  for (std::size_t k = 0; k < p.num_states; ++k) {
    Tensor mk = ad::element(p.emission_means, k);
    Tensor lvk = ad::element(p.emission_log_vars, k);
    cols.push_back(gaussian_log_density(s, mk, lvk));
  }
  return ad::stack_cols(cols);
}

// branch 2: mean-reverting AR(1) whose level, pull and innovation variance
// switch with the state; the first step gets its own Gaussian
Tensor scores_msar(const Tensor& s, const SourcePriorParams& p) {
  const std::size_t t = s.numel();
  Tensor first = ad::reshape(ad::element(s, 0), {1});
  Tensor prev = t > 1 ? ad::slice_rows(s, 0, t - 1) : Tensor();
  Tensor cur = t > 1 ? ad::slice_rows(s, 1, t - 1) : Tensor();
  std::vector<Tensor> cols;
  for (std::size_t k = 0; k < p.num_states; ++k) {
    Tensor head = gaussian_log_density(first, ad::element(p.init_means, k),
                                       ad::element(p.init_log_vars, k));
    if (t == 1) {
      cols.push_back(head);
      continue;
    }
    Tensor level = ad::element(p.ar_levels, k);
    Tensor pull = ad::element(p.ar_coeffs, k);
    Tensor cond_mean = level + pull * (prev - level);
    Tensor tail = gaussian_log_density(cur, cond_mean, ad::element(p.innov_log_vars, k));
    cols.push_back(ad::concat(head, tail));
  }
  return ad::stack_cols(cols);
}

// branch 3: AR(1) residual mapped back to a standard normal through the
// state's monotone flow; change of variables supplies the log-derivative
Tensor scores_state_flow(const Tensor& s, const SourcePriorParams& p) {
  const std::size_t t = s.numel();
  Tensor first = ad::reshape(ad::element(s, 0), {1});
  Tensor prev = t > 1 ? ad::slice_rows(s, 0, t - 1) : Tensor();
  Tensor cur = t > 1 ? ad::slice_rows(s, 1, t - 1) : Tensor();
  std::vector<Tensor> cols;
  for (std::size_t k = 0; k < p.num_states; ++k) {
    Tensor head = gaussian_log_density(first, ad::element(p.init_means, k),
                                       ad::element(p.init_log_vars, k));
    if (t == 1) {
      cols.push_back(head);
      continue;
    }
    Tensor coeff = ad::element(p.ar_coeffs, k);
    Tensor log_scale = ad::element(p.log_scales, k);
    Tensor u = (cur - coeff * prev) * ad::exp(-log_scale);
    auto [eps, log_det] = flow::flow_inverse_with_logdet(p.state_flows[k], u);
    Tensor tail = -0.5 * (ad::square(eps) + kLog2Pi) + log_det - log_scale;
    cols.push_back(ad::concat(head, tail));
  }
  return ad::stack_cols(cols);
}

}  // namespace

Tensor local_scores(const Tensor& trajectory, const SourcePriorParams& p) {
  if (trajectory.rank() != 1 || trajectory.numel() == 0)
    throw std::invalid_argument("local_scores: non-empty rank-1 trajectory required");
  switch (p.branch) {
    case Branch::kGaussianEmission: return scores_gaussian_emission(trajectory, p);
    case Branch::kMsar: return scores_msar(trajectory, p);
    case Branch::kStateFlow: return scores_state_flow(trajectory, p);
  }
  throw std::logic_error("local_scores: unreachable");
}

Tensor log_initial(const Tensor& init_logits) {
  return init_logits - ad::logsumexp(init_logits, 0);
}

Tensor log_transition_t(const Tensor& trans_logits) {
  // transposing first puts the source state on the trailing axis, where the
  // per-row normalizer broadcasts; entry [k][a] = log P(a -> k)
  return ad::transpose(trans_logits) - ad::logsumexp(trans_logits, 1);
}

Tensor hmm_forward_logsum(const Tensor& local, const Tensor& log_init,
                          const Tensor& log_trans_t) {
  if (local.rank() != 2) throw std::invalid_argument("forward: local scores must be [T,K]");
  const std::size_t t_len = local.shape()[0], k = local.shape()[1];
  if (t_len == 0 || k == 0) throw std::invalid_argument("forward: empty trajectory");
  if (log_init.shape() != ad::Shape{k} || log_trans_t.shape() != ad::Shape{k, k})
    throw std::invalid_argument("forward: parameter shapes disagree with local scores");

  const auto& lv = local.value();
  const auto& pv = log_init.value();
  const auto& bv = log_trans_t.value();

  std::vector<double> alpha(t_len * k);
  for (std::size_t j = 0; j < k; ++j) alpha[j] = pv[j] + lv[j];
  for (std::size_t t = 1; t < t_len; ++t)
    for (std::size_t j = 0; j < k; ++j) {
      double m = alpha[(t - 1) * k] + bv[j * k];
      for (std::size_t a = 1; a < k; ++a)
        m = std::max(m, alpha[(t - 1) * k + a] + bv[j * k + a]);
      double acc = 0.0;
      for (std::size_t a = 0; a < k; ++a)
        acc += std::exp(alpha[(t - 1) * k + a] + bv[j * k + a] - m);
      alpha[t * k + j] = lv[t * k + j] + m + std::log(acc);
    }
  double m = alpha[(t_len - 1) * k];
  for (std::size_t j = 1; j < k; ++j) m = std::max(m, alpha[(t_len - 1) * k + j]);
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) acc += std::exp(alpha[(t_len - 1) * k + j] - m);
  const double total = m + std::log(acc);

  const bool track =
      ad::recording() && (local.tracked() || log_init.tracked() || log_trans_t.tracked());
  Tensor res = ad::make_op_output({}, {total}, track);
  if (track) {
    auto ld = local.data();
    auto pd = log_init.data();
    auto bd = log_trans_t.data();
    auto od = res.data();
    ad::Tape::active()->record(
        res, [ld, pd, bd, od, alpha = std::move(alpha), t_len, k]() {
          if (od->grad.empty()) return;
          const double g = od->grad[0];
          const double total = od->value[0];
          double* gl = ad::grad_ptr(*ld);
          double* gp = ad::grad_ptr(*pd);
          double* gb = ad::grad_ptr(*bd);
          std::vector<double> ga(k), gprev(k);
          for (std::size_t j = 0; j < k; ++j)
            ga[j] = g * std::exp(alpha[(t_len - 1) * k + j] - total);
          for (std::size_t t = t_len; t-- > 1;) {
            std::fill(gprev.begin(), gprev.end(), 0.0);
            for (std::size_t j = 0; j < k; ++j) {
              if (gl) gl[t * k + j] += ga[j];
              if (ga[j] == 0.0) continue;
              // alpha - local is exactly the logsumexp this step produced
              const double denom = alpha[t * k + j] - ld->value[t * k + j];
              for (std::size_t a = 0; a < k; ++a) {
                const double w = std::exp(alpha[(t - 1) * k + a] + bd->value[j * k + a] - denom);
                if (gb) gb[j * k + a] += ga[j] * w;
                gprev[a] += ga[j] * w;
              }
            }
            ga.swap(gprev);
          }
          for (std::size_t j = 0; j < k; ++j) {
            if (gl) gl[j] += ga[j];
            if (gp) gp[j] += ga[j];
          }
        });
  }
  return res;
}

Tensor source_log_likelihood(const Tensor& trajectory, const SourcePriorParams& p) {
  return hmm_forward_logsum(local_scores(trajectory, p), log_initial(p.init_logits),
                            log_transition_t(p.trans_logits));
}

Tensor total_prior_logp(const Tensor& latents, const std::vector<SourcePriorParams>& priors) {
  if (latents.rank() != 2)
    throw std::invalid_argument("total_prior_logp: latents must be [T,n]");
  if (latents.shape()[1] != priors.size())
    throw std::invalid_argument("total_prior_logp: latent count " +
                                std::to_string(latents.shape()[1]) + " does not match " +
                                std::to_string(priors.size()) + " priors");
  Tensor total = Tensor::scalar(0.0);
  for (std::size_t j = 0; j < priors.size(); ++j)
    total = total + source_log_likelihood(ad::col(latents, j), priors[j]);
  return total;
}

}  // namespace hmmvae::prior
