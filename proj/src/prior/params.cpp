#include "prior/params.hpp"

#include <cmath>
#include <stdexcept>

namespace hmmvae::prior {

using ad::Tensor;

Branch branch_from_int(int b) {
  switch (b) {
    case 1: return Branch::kGaussianEmission;
    case 2: return Branch::kMsar;
    case 3: return Branch::kStateFlow;
    default: throw std::invalid_argument("branch must be 1, 2 or 3, got " + std::to_string(b));
  }
}

int branch_to_int(Branch b) { return static_cast<int>(b); }

std::vector<ad::Tensor> SourcePriorParams::trainable() const {
  std::vector<ad::Tensor> out = {init_logits, trans_logits};
  switch (branch) {
    case Branch::kGaussianEmission:
      out.push_back(emission_means);
      out.push_back(emission_log_vars);
      break;
    case Branch::kMsar:
      out.push_back(init_means);
      out.push_back(init_log_vars);
      out.push_back(ar_levels);
      out.push_back(ar_coeffs);
      out.push_back(innov_log_vars);
      break;
    case Branch::kStateFlow:
      out.push_back(init_means);
      out.push_back(init_log_vars);
      out.push_back(ar_coeffs);
      out.push_back(log_scales);
      for (const auto& f : state_flows) {
        out.push_back(f.skew);
        out.push_back(f.tail_raw);
      }
      break;
  }
  return out;
}

namespace {

std::vector<double> spread_means(std::size_t k) {
  std::vector<double> m(k, 0.0);
  if (k > 1)
    for (std::size_t i = 0; i < k; ++i)
      m[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(k - 1);
  return m;
}

Tensor noisy_logits(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, 0.1);
  return Tensor::param({n}, v);
}

}  // namespace

SourcePriorParams make_source_prior(Branch branch, std::size_t num_states,
                                    std::size_t flow_layers, Rng& rng) {
  if (num_states == 0) throw std::invalid_argument("prior: at least one state required");
  const std::size_t k = num_states;
  SourcePriorParams p;
  p.branch = branch;
  p.num_states = k;

  p.init_logits = noisy_logits(k, rng);
  {
    std::vector<double> v(k * k);
    for (auto& x : v) x = rng.normal(0.0, 0.1);
    for (std::size_t i = 0; i < k; ++i) v[i * k + i] += 2.0;  // favor self-transitions
    p.trans_logits = Tensor::param({k, k}, v);
  }

  const std::vector<double> means = spread_means(k);
  const std::vector<double> log_half(k, std::log(0.5));

  switch (branch) {
    case Branch::kGaussianEmission:
      p.emission_means = Tensor::param({k}, means);
      p.emission_log_vars = Tensor::param({k}, log_half);
      break;
    case Branch::kMsar:
      p.init_means = Tensor::param({k}, means);
      p.init_log_vars = Tensor::param({k}, log_half);
      p.ar_levels = Tensor::param({k}, means);
      p.ar_coeffs = Tensor::param({k}, std::vector<double>(k, 0.0));
      p.innov_log_vars = Tensor::param({k}, log_half);
      break;
    case Branch::kStateFlow:
      p.init_means = Tensor::param({k}, means);
      p.init_log_vars = Tensor::param({k}, log_half);
      p.ar_coeffs = Tensor::param({k}, std::vector<double>(k, 0.0));
      // residual scale starts at sqrt(0.5) for a comparable induced variance
      p.log_scales = Tensor::param({k}, std::vector<double>(k, 0.5 * std::log(0.5)));
      for (std::size_t i = 0; i < k; ++i)
        p.state_flows.push_back(flow::FlowParams::identity(flow_layers));
      break;
  }
  return p;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  std::vector<double> out(logits.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    acc += out[i];
  }
  for (auto& v : out) v /= acc;
  return out;
}

Mat row_softmax_mat(const ad::Tensor& logits_kk) {
  const std::size_t k = logits_kk.shape()[0];
  Mat out(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> rowv(k);
    for (std::size_t c = 0; c < k; ++c) rowv[c] = logits_kk.value_at(r * k + c);
    const std::vector<double> sm = softmax(rowv);
    for (std::size_t c = 0; c < k; ++c) out(r, c) = sm[c];
  }
  return out;
}

namespace {

std::vector<double> exp_all(const ad::Tensor& t) {
  std::vector<double> v = t.value();
  for (auto& x : v) x = std::exp(x);
  return v;
}

}  // namespace

SourceSnapshot snapshot_source(const SourcePriorParams& p) {
  SourceSnapshot s;
  s.branch = branch_to_int(p.branch);
  s.initial = softmax(p.init_logits.value());
  s.transition = row_softmax_mat(p.trans_logits);
  switch (p.branch) {
    case Branch::kGaussianEmission:
      s.payload.emplace_back("means", p.emission_means.value());
      s.payload.emplace_back("variances", exp_all(p.emission_log_vars));
      break;
    case Branch::kMsar:
      s.payload.emplace_back("initial_means", p.init_means.value());
      s.payload.emplace_back("initial_variances", exp_all(p.init_log_vars));
      s.payload.emplace_back("levels", p.ar_levels.value());
      s.payload.emplace_back("ar_coeffs", p.ar_coeffs.value());
      s.payload.emplace_back("innovation_variances", exp_all(p.innov_log_vars));
      break;
    case Branch::kStateFlow: {
      s.payload.emplace_back("initial_means", p.init_means.value());
      s.payload.emplace_back("initial_variances", exp_all(p.init_log_vars));
      s.payload.emplace_back("ar_coeffs", p.ar_coeffs.value());
      s.payload.emplace_back("scales", exp_all(p.log_scales));
      std::vector<double> skew, tail;
      for (const auto& f : p.state_flows) {
        for (std::size_t l = 0; l < f.layers(); ++l) {
          skew.push_back(f.skew.value_at(l));
          const double raw = f.tail_raw.value_at(l);
          tail.push_back(std::max(raw, 0.0) + std::log1p(std::exp(-std::abs(raw))) +
                         flow::kMinTailWeight);
        }
      }
      s.payload.emplace_back("flow_skew", skew);
      s.payload.emplace_back("flow_tail_weight", tail);
      break;
    }
  }
  return s;
}

}  // namespace hmmvae::prior
