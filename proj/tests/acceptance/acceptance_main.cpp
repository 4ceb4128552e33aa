// Acceptance suite: ten end-to-end correctness and quality gates, one
// PASS/FAIL line each. Exit code 0 only when every criterion holds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ad/ops.hpp"
#include "ad/tape.hpp"
#include "ad/tensor.hpp"
#include "common/mat.hpp"
#include "common/rng.hpp"
#include "eval/metrics.hpp"
#include "exp/config.hpp"
#include "exp/runner.hpp"
#include "flow/flow.hpp"
#include "model/losses.hpp"
#include "model/mlp.hpp"
#include "model/train.hpp"
#include "prior/decode.hpp"
#include "prior/params.hpp"
#include "prior/scoring.hpp"
#include "support/oracles.hpp"
#include "synth/episode.hpp"
#include "synth/specs.hpp"

using namespace hmmvae;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

#ifndef ACCEPTANCE_CONFIG_DIR
#error "ACCEPTANCE_CONFIG_DIR must point at the configs directory"
#endif

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// fills a prior with random values that stay in every branch's valid domain
// (|a| < 1 for stationarity, moderate scales so density mass stays in view)
void randomize_prior(prior::SourcePriorParams& p, Rng& rng) {
  auto fill = [&](ad::Tensor& t, double mean, double sd) {
    for (auto& v : t.mutable_value()) v = rng.normal(mean, sd);
  };
  fill(p.init_logits, 0.0, 1.0);
  fill(p.trans_logits, 0.0, 1.0);
  switch (p.branch) {
    case prior::Branch::kGaussianEmission:
      fill(p.emission_means, 0.0, 1.0);
      fill(p.emission_log_vars, 0.0, 0.3);
      break;
    case prior::Branch::kMsar:
      fill(p.init_means, 0.0, 1.0);
      fill(p.init_log_vars, 0.0, 0.3);
      fill(p.ar_levels, 0.0, 1.0);
      fill(p.innov_log_vars, 0.0, 0.3);
      for (auto& v : p.ar_coeffs.mutable_value()) v = 0.9 * std::tanh(rng.normal());
      break;
    case prior::Branch::kStateFlow:
      fill(p.init_means, 0.0, 1.0);
      fill(p.init_log_vars, 0.0, 0.3);
      for (auto& v : p.ar_coeffs.mutable_value()) v = 0.9 * std::tanh(rng.normal());
      for (auto& v : p.log_scales.mutable_value()) v = rng.uniform(-0.3, 0.3);
      for (auto& f : p.state_flows) {
        for (auto& v : f.skew.mutable_value()) v = rng.uniform(-0.3, 0.3);
        for (auto& v : f.tail_raw.mutable_value()) v = rng.uniform(0.2, 0.84);
      }
      break;
  }
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - m);
  const double lse = m + std::log(acc);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

// row-normalized transition logits as log P(a -> b)
Mat log_transition_rows(const ad::Tensor& trans_logits) {
  const std::size_t k = trans_logits.shape()[0];
  Mat out(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<double> row(k);
    for (std::size_t b = 0; b < k; ++b) row[b] = trans_logits.value()[a * k + b];
    const auto lsm = log_softmax(row);
    for (std::size_t b = 0; b < k; ++b) out(a, b) = lsm[b];
  }
  return out;
}

double path_score(const std::vector<int>& path, const Mat& local,
                  const std::vector<double>& log_init, const Mat& log_trans) {
  double s = log_init[static_cast<std::size_t>(path[0])] +
             local(0, static_cast<std::size_t>(path[0]));
  for (std::size_t t = 1; t < path.size(); ++t)
    s += log_trans(static_cast<std::size_t>(path[t - 1]), static_cast<std::size_t>(path[t])) +
         local(t, static_cast<std::size_t>(path[t]));
  return s;
}

// ---------------------------------------------------------------- criterion 1
bool crit1(std::string& detail) {
  const auto t0 = Clock::now();
  double worst_fwd = 0.0, worst_vit = 0.0, worst_marg = 0.0;
  for (int b = 1; b <= 3; ++b) {
    Rng rng(1000 + static_cast<std::uint64_t>(b));
    for (int inst = 0; inst < 50; ++inst) {
      const std::size_t K = 1 + static_cast<std::size_t>(inst) % 3;
      const std::size_t T = 2 + static_cast<std::size_t>(inst) % 5;
      auto p = prior::make_source_prior(prior::branch_from_int(b), K, 2, rng);
      randomize_prior(p, rng);
      std::vector<double> vals(T);
      for (auto& v : vals) v = rng.normal(0.0, 1.5);
      const ad::Tensor traj = ad::Tensor::constant({T}, vals);

      const ad::Tensor local_t = prior::local_scores(traj, p);
      Mat local(T, K);
      local.d = local_t.value();
      const std::vector<double> log_init = log_softmax(p.init_logits.value());
      const Mat log_trans = log_transition_rows(p.trans_logits);

      const double fwd = prior::source_log_likelihood(traj, p).scalar_value();
      const double fwd_ref = oracles::enumerate_log_likelihood(local, log_init, log_trans);
      worst_fwd = std::max(worst_fwd, std::abs(fwd - fwd_ref));

      const auto decoded = prior::viterbi(local_t, p.init_logits, p.trans_logits);
      std::vector<int> path0(T);
      for (std::size_t t = 0; t < T; ++t) path0[t] = decoded[t] - 1;
      const auto best = oracles::enumerate_best_path(local, log_init, log_trans);
      worst_vit = std::max(worst_vit, std::abs(path_score(path0, local, log_init, log_trans) -
                                               path_score(best, local, log_init, log_trans)));

      const Mat marg = prior::forward_backward(local_t, p.init_logits, p.trans_logits);
      const Mat marg_ref = oracles::enumerate_state_marginals(local, log_init, log_trans);
      for (std::size_t i = 0; i < marg.d.size(); ++i)
        worst_marg = std::max(worst_marg, std::abs(marg.d[i] - marg_ref.d[i]));
    }
  }
  const double secs = seconds_since(t0);
  detail = "max |forward err| " + num(worst_fwd) + ", |viterbi score err| " + num(worst_vit) +
           ", |marginal err| " + num(worst_marg) + ", " + num(secs) + "s";
  return worst_fwd < 1e-9 && worst_vit < 1e-9 && worst_marg < 1e-10 && secs < 10.0;
}

// ---------------------------------------------------------------- criterion 2
synth::EpisodeData tiny_episode(std::size_t T, std::uint64_t seed) {
  synth::SourceSpec s1;
  s1.kind = synth::SourceKind::kGaussianEmission;
  s1.num_states = 2;
  s1.initial = {0.5, 0.5};
  s1.transition = Mat::from_rows({{0.9, 0.1}, {0.1, 0.9}});
  s1.means = {-1.0, 1.0};
  s1.variances = {0.04, 0.04};
  synth::SourceSpec s2 = s1;
  s2.means = {-0.8, 1.2};
  const synth::MixingSpec mix =
      synth::MixingSpec::linear(Mat::from_rows({{0.8, 0.6}, {0.6, -0.8}}), 0.01);
  return synth::make_episode({s1, s2}, mix, T, seed);
}

bool crit2(std::string& detail) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  const synth::EpisodeData episode = tiny_episode(8, 5);
  for (int b = 1; b <= 3; ++b) {
    model::TrainConfig tc;
    tc.branch = prior::branch_from_int(b);
    tc.num_states = 2;
    tc.flow_layers = 2;
    tc.encoder_hidden = {4};
    tc.seed = 9;
    model::TrainState state = model::init_train_state(tc, episode);
    const Mat noise = model::draw_noise(8, 2, state.noise_rng);
    const double beta = 0.05;

    const std::vector<ad::Tensor> params = model::collect_trainable(state);
    for (auto& t : params) const_cast<ad::Tensor&>(t).zero_grad();
    {
      ad::Tape tape;
      ad::Tape::Scope scope(tape);
      const auto lb = model::total_loss(episode.observations, state.encoder, state.decoder,
                                        state.log_var, state.priors, beta, noise);
      tape.backward(lb.total);
    }
    std::vector<std::vector<double>> autodiff;
    for (const auto& t : params) autodiff.push_back(t.grad());

    const auto loss_value = [&] {
      return model::total_loss(episode.observations, state.encoder, state.decoder,
                               state.log_var, state.priors, beta, noise)
          .total_value;
    };
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
      const std::size_t n = params[pi].numel();
      std::vector<std::size_t> probes = {0, n / 2, n - 1};
      probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
      for (std::size_t i : probes) {
        const double fd = oracles::fd_gradient(loss_value, params[pi], i, 1e-5);
        worst = std::max(worst, oracles::rel_err(autodiff[pi][i], fd));
      }
    }
  }
  const double secs = seconds_since(t0);
  detail = "max rel err " + num(worst) + " over all parameter groups x 3 branches, " +
           num(secs) + "s";
  return worst < 1e-4 && secs < 60.0;
}

// ---------------------------------------------------------------- criterion 3
bool crit3(std::string& detail) {
  double worst = 0.0;
  for (int b = 1; b <= 3; ++b) {
    Rng rng(3000 + static_cast<std::uint64_t>(b));
    for (int d = 0; d < 20; ++d) {
      const std::size_t K = 1 + static_cast<std::size_t>(d) % 3;
      auto p = prior::make_source_prior(prior::branch_from_int(b), K, 2, rng);
      randomize_prior(p, rng);
      const double prev = rng.normal(0.0, 1.5);
      const std::size_t k = static_cast<std::size_t>(d) % K;
      const auto density = [&](double x) {
        const ad::Tensor traj = ad::Tensor::constant({2}, {prev, x});
        return std::exp(prior::local_scores(traj, p).value()[K + k]);
      };
      const double integral = oracles::trapezoid(density, -30.0, 30.0, 2001);
      worst = std::max(worst, std::abs(integral - 1.0));
    }
  }
  detail = "max |integral - 1| = " + num(worst) + " over 20 draws x 3 branches";
  return worst <= 1e-6;
}

// ---------------------------------------------------------------- criterion 4
bool crit4(std::string& detail) {
  const std::pair<double, double> combos[] = {{0.0, 1.0}, {0.5, 0.7},  {-0.5, 1.4},
                                              {0.3, 1.0}, {-0.8, 0.9}, {1.0, 1.2}};
  double worst_rt = 0.0;
  for (const auto& [gamma, delta] : combos) {
    for (int i = 0; i <= 2000; ++i) {
      const double u = -50.0 + 100.0 * i / 2000.0;
      const double there = flow::sash_forward(u, gamma, delta);
      worst_rt = std::max(worst_rt, std::abs(flow::sash_inverse(there, gamma, delta) - u));
      const double back = flow::sash_inverse(u, gamma, delta);
      worst_rt = std::max(worst_rt, std::abs(flow::sash_forward(back, gamma, delta) - u));
    }
  }

  // inverse log-derivative through a two-layer stack vs finite differences
  flow::FlowParams p;
  p.skew = ad::Tensor::param({2}, {0.4, -0.3});
  p.tail_raw = ad::Tensor::param({2}, {flow::FlowParams::raw_from_tail_weight(0.8),
                                       flow::FlowParams::raw_from_tail_weight(1.3)});
  const double g0 = 0.4, g1 = -0.3, d0 = 0.8, d1 = 1.3;
  const auto inverse_stack = [&](double u) {
    return flow::sash_inverse(flow::sash_inverse(u, g1, d1), g0, d0);
  };
  double worst_jac = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double u = -12.0 + 24.0 * i / 400.0;
    const auto [eps, log_det] =
        flow::flow_inverse_with_logdet(p, ad::Tensor::constant({1}, {u}));
    const double deriv = std::exp(log_det.value()[0]);
    const double h = 1e-5 * std::max(1.0, std::abs(u));
    const double fd = (inverse_stack(u + h) - inverse_stack(u - h)) / (2.0 * h);
    worst_jac = std::max(worst_jac, oracles::rel_err(deriv, fd));
  }
  detail = "max round-trip err " + num(worst_rt) + ", max inverse-Jacobian rel err " +
           num(worst_jac);
  return worst_rt < 1e-10 && worst_jac < 1e-6;
}

// ---------------------------------------------------------------- criterion 5
bool crit5(std::string& detail) {
  Rng rng(55);
  const std::size_t T = 12, K = 2;
  std::vector<double> vals(T);
  for (auto& v : vals) v = rng.normal(0.0, 1.2);
  const ad::Tensor traj = ad::Tensor::constant({T}, vals);

  const std::vector<double> init_l = {0.3, -0.4};
  const std::vector<double> trans_l = {1.2, -0.3, 0.1, 0.8};
  const std::vector<double> mu = {-0.7, 0.9};
  const std::vector<double> lv = {std::log(0.6), std::log(1.7)};

  const auto with_chain = [&](prior::SourcePriorParams p) {
    p.init_logits.mutable_value() = init_l;
    p.trans_logits.mutable_value() = trans_l;
    return p;
  };

  auto p1 = with_chain(prior::make_source_prior(prior::Branch::kGaussianEmission, K, 1, rng));
  p1.emission_means.mutable_value() = mu;
  p1.emission_log_vars.mutable_value() = lv;

  auto p2 = with_chain(prior::make_source_prior(prior::Branch::kMsar, K, 1, rng));
  p2.init_means.mutable_value() = mu;
  p2.init_log_vars.mutable_value() = lv;
  p2.ar_levels.mutable_value() = mu;
  p2.ar_coeffs.mutable_value() = {0.0, 0.0};
  p2.innov_log_vars.mutable_value() = lv;

  const auto l1 = prior::local_scores(traj, p1).value();
  const auto l2 = prior::local_scores(traj, p2).value();
  double worst12 = 0.0;
  for (std::size_t i = K; i < l1.size(); ++i)  // rows for t >= 2 (1-based)
    worst12 = std::max(worst12, std::abs(l1[i] - l2[i]));
  const double fwd12 = std::abs(prior::source_log_likelihood(traj, p1).scalar_value() -
                                prior::source_log_likelihood(traj, p2).scalar_value());

  auto p1z = with_chain(prior::make_source_prior(prior::Branch::kGaussianEmission, K, 1, rng));
  p1z.emission_means.mutable_value() = {0.0, 0.0};
  p1z.emission_log_vars.mutable_value() = lv;

  auto p3 = with_chain(prior::make_source_prior(prior::Branch::kStateFlow, K, 2, rng));
  p3.init_means.mutable_value() = {0.0, 0.0};
  p3.init_log_vars.mutable_value() = lv;
  p3.ar_coeffs.mutable_value() = {0.0, 0.0};
  p3.log_scales.mutable_value() = {0.5 * lv[0], 0.5 * lv[1]};
  for (auto& f : p3.state_flows) f = flow::FlowParams::identity(2);

  const auto l1z = prior::local_scores(traj, p1z).value();
  const auto l3 = prior::local_scores(traj, p3).value();
  double worst3 = 0.0;
  for (std::size_t i = 0; i < l1z.size(); ++i)
    worst3 = std::max(worst3, std::abs(l1z[i] - l3[i]));
  const double fwd3 = std::abs(prior::source_log_likelihood(traj, p1z).scalar_value() -
                               prior::source_log_likelihood(traj, p3).scalar_value());

  detail = "AR-at-zero vs level prior max diff " + num(std::max(worst12, fwd12)) +
           ", identity-flow vs zero-mean prior max diff " + num(std::max(worst3, fwd3));
  return worst12 < 1e-12 && fwd12 < 1e-12 && worst3 < 1e-10 && fwd3 < 1e-10;
}

// ------------------------------------------------------- criteria 6, 7 and 8
struct BranchEval {
  model::TrainResult result;
  eval::MatchResult match;
  std::vector<double> state_acc;
  std::vector<bool> learned_dd;
  std::vector<double> tv;
  double lead_mean = 0.0;
  double trail_mean = 0.0;
  double minutes = 0.0;
};

BranchEval run_and_eval(const synth::EpisodeData& episode, model::TrainConfig tc, int branch) {
  tc.branch = prior::branch_from_int(branch);
  const auto t0 = Clock::now();
  BranchEval be;
  be.result = model::train(episode, tc);
  be.minutes = seconds_since(t0) / 60.0;

  const auto& curve = be.result.report.loss_curve;
  const std::size_t w = std::min<std::size_t>(500, curve.size() / 2);
  for (std::size_t i = 0; i < w; ++i) {
    be.lead_mean += curve[i].total / static_cast<double>(w);
    be.trail_mean += curve[curve.size() - 1 - i].total / static_cast<double>(w);
  }

  const Mat mu = model::apply_mlp_values(be.result.state.encoder, episode.observations);
  be.match = eval::match_sources(mu, episode.sources);
  const std::size_t K = tc.num_states;
  std::vector<std::size_t> identity(K);
  for (std::size_t k = 0; k < K; ++k) identity[k] = k;
  for (std::size_t j = 0; j < episode.sources.cols; ++j) {
    const std::size_t latent = be.match.permutation[j];
    const auto& pr = be.result.state.priors[latent];
    const ad::Tensor traj = ad::Tensor::constant({episode.T}, mu.col(latent));
    const auto decoded =
        prior::viterbi(prior::local_scores(traj, pr), pr.init_logits, pr.trans_logits);
    be.state_acc.push_back(eval::match_states(decoded, episode.states.col(j), K).accuracy);
    const auto snap = prior::snapshot_source(pr);
    const auto emp = eval::empirical_transition_matrix(decoded, K);
    const auto agree = eval::transition_agreement(snap.transition, emp.matrix, identity);
    be.tv.push_back(agree.mean_tv);
    be.learned_dd.push_back(agree.learned_diag_dominant);
  }
  return be;
}

bool crit6(std::string& detail, std::vector<BranchEval>& runs) {
  const auto cfg = exp::load_config(std::string(ACCEPTANCE_CONFIG_DIR) + "/default.json");
  const auto episode = cfg.realize_episode();
  bool pass = true;
  std::ostringstream d;
  for (int b = 1; b <= 3; ++b) {
    BranchEval be = run_and_eval(episode, cfg.train, b);
    const bool ok = be.match.mean_abs_corr >= 0.95 && be.trail_mean < be.lead_mean &&
                    be.minutes <= 10.0;
    if (b > 1) d << "; ";
    d << "variant " << b << ": mean |corr| " << num(be.match.mean_abs_corr) << ", loss "
      << num(be.lead_mean) << " -> " << num(be.trail_mean) << ", " << num(be.minutes)
      << " min" << (ok ? "" : " (!)");
    pass = pass && ok;
    runs.push_back(std::move(be));
  }
  detail = d.str();
  return pass;
}

bool crit7(std::string& detail, const std::vector<BranchEval>& runs) {
  bool pass = true;
  std::ostringstream d;
  for (int b = 1; b <= 2; ++b) {
    const BranchEval& be = runs[static_cast<std::size_t>(b - 1)];
    bool dd = true;
    double worst_tv = 0.0;
    for (std::size_t j = 0; j < be.tv.size(); ++j) {
      dd = dd && be.learned_dd[j];
      worst_tv = std::max(worst_tv, be.tv[j]);
    }
    const bool ok = dd && worst_tv < 0.15;
    if (b > 1) d << "; ";
    d << "variant " << b << ": diag-dominant " << (dd ? "yes" : "NO") << ", max mean TV "
      << num(worst_tv) << (ok ? "" : " (!)");
    pass = pass && ok;
  }
  detail = d.str();
  return pass;
}

bool crit8(std::string& detail) {
  const auto cfg = exp::load_config(std::string(ACCEPTANCE_CONFIG_DIR) + "/msar.json");
  const auto episode = cfg.realize_episode();
  const BranchEval b2 = run_and_eval(episode, cfg.train, 2);
  const BranchEval b3 = run_and_eval(episode, cfg.train, 3);
  bool pass = true;
  std::ostringstream d;
  d << "AR variant per-source state accuracy";
  for (double a : b2.state_acc) {
    d << ' ' << num(a);
    pass = pass && a >= 0.8;
  }
  d << "; flow variant (reported only)";
  for (double a : b3.state_acc) d << ' ' << num(a);
  detail = d.str();
  return pass;
}

// ---------------------------------------------------------------- criterion 9
bool crit9(std::string& detail) {
  Rng rng(99);
  const std::size_t T = 30, n = 3;
  std::vector<prior::SourcePriorParams> priors;
  for (int b = 1; b <= 3; ++b) {
    priors.push_back(prior::make_source_prior(prior::branch_from_int(b), 2, 2, rng));
    randomize_prior(priors.back(), rng);
  }
  std::vector<double> lv(T * n);
  for (auto& v : lv) v = rng.normal(0.0, 1.0);
  ad::Tensor latents = ad::Tensor::param({T, n}, lv);

  // snapshot every prior value so perturbations can be undone exactly
  std::vector<std::vector<std::vector<double>>> saved(n);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& t : priors[j].trainable()) saved[j].push_back(t.value());

  bool pass = true;
  for (std::size_t target = 0; target < n; ++target) {
    latents.zero_grad();
    for (auto& p : priors)
      for (auto& t : p.trainable()) const_cast<ad::Tensor&>(t).zero_grad();

    double base = 0.0;
    {
      ad::Tape tape;
      ad::Tape::Scope scope(tape);
      const ad::Tensor L =
          prior::source_log_likelihood(ad::col(latents, target), priors[target]);
      base = L.scalar_value();
      tape.backward(L);
    }
    // cross-source parameter gradients are exactly zero…
    for (std::size_t j = 0; j < n; ++j) {
      bool own_nonzero = false;
      for (const auto& t : priors[j].trainable())
        for (double g : t.grad()) {
          if (j != target) pass = pass && g == 0.0;
          own_nonzero = own_nonzero || g != 0.0;
        }
      if (j == target) pass = pass && own_nonzero;  // …while own gradients flow
    }
    // …and so are gradients into every other latent column
    const auto lg = latents.grad();
    bool own_col_nonzero = false;
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t c = 0; c < n; ++c) {
        if (c != target) pass = pass && lg[t * n + c] == 0.0;
        else own_col_nonzero = own_col_nonzero || lg[t * n + c] != 0.0;
      }
    pass = pass && own_col_nonzero;

    // value-level: perturbing every other source's parameters leaves this
    // source's log-likelihood bit-for-bit unchanged
    for (std::size_t j = 0; j < n; ++j) {
      if (j == target) continue;
      for (auto& t : priors[j].trainable())
        for (auto& v : const_cast<ad::Tensor&>(t).mutable_value()) v += 0.37;
    }
    const double shifted =
        prior::source_log_likelihood(ad::col(latents, target), priors[target]).scalar_value();
    pass = pass && shifted == base;
    for (std::size_t j = 0; j < n; ++j) {  // exact restore from the snapshot
      std::size_t ti = 0;
      for (auto& t : priors[j].trainable())
        const_cast<ad::Tensor&>(t).mutable_value() = saved[j][ti++];
    }
  }
  detail = pass ? "cross-source gradients and likelihood shifts exactly zero"
                : "leakage across sources detected";
  return pass;
}

// --------------------------------------------------------------- criterion 10
bool crit10(std::string& detail) {
  auto cfg = exp::load_config(std::string(ACCEPTANCE_CONFIG_DIR) + "/smoke.json");
  const fs::path scratch = fs::temp_directory_path() / "hmmvae_acceptance_det";
  fs::remove_all(scratch);
  const auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  for (const char* sub : {"a", "b"}) {
    auto c = cfg;
    c.output_dir = (scratch / sub).string();
    exp::run_experiment(c);
  }
  bool pass = true;
  std::string first_differing;
  for (const char* f : {"loss.csv", "sources.csv", "states.csv", "transitions.csv",
                        "metrics.csv", "priors.json", "loss.svg", "sources.svg", "states.svg",
                        "transitions.svg"}) {
    if (slurp(scratch / "a" / f) != slurp(scratch / "b" / f)) {
      pass = false;
      if (first_differing.empty()) first_differing = f;
    }
  }
  detail = pass ? "all CSV, JSON and SVG outputs byte-identical across two runs"
                : "outputs differ, first at " + first_differing;
  return pass;
}

}  // namespace

int main() {
  bool all = true;
  const auto emit = [&](int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("%s: criterion %2d (%s) — %s\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    std::fflush(stdout);
    all = all && pass;
  };

  std::string d;
  emit(1, "forward/Viterbi/smoothing vs exhaustive enumeration", crit1(d), d);
  emit(2, "autodiff vs finite differences on the full loss", crit2(d), d);
  emit(3, "one-step conditional densities integrate to one", crit3(d), d);
  emit(4, "flow round-trip and inverse Jacobian", crit4(d), d);
  emit(5, "prior variants nest where parameters degenerate", crit5(d), d);

  std::vector<BranchEval> default_runs;
  emit(6, "end-to-end source separation on the default scenario", crit6(d, default_runs), d);
  emit(7, "learned transition structure matches decoded paths", crit7(d, default_runs), d);
  emit(8, "regime recovery on a switching-AR episode", crit8(d), d);
  emit(9, "per-source factorization isolates gradients", crit9(d), d);
  emit(10, "bitwise deterministic outputs", crit10(d), d);

  return all ? 0 : 1;
}
