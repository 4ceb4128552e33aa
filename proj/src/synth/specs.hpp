#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common/mat.hpp"
#include "common/rng.hpp"

namespace hmmvae::synth {

// generator-side source families, mirroring the three prior branches
enum class SourceKind {
  kGaussianEmission,  // "gaussian-emission"
  kMsar,              // "msar"
  kStateFlow,         // "state-flow"
};

SourceKind source_kind_from_string(const std::string& s);
std::string source_kind_to_string(SourceKind k);

struct FlowLayerSpec {
  double skew = 0.0;         // gamma
  double tail_weight = 1.0;  // delta > 0
};

// Ground-truth description of one hidden source: a Markov chain over
// num_states states plus a per-state emission law of the chosen kind.
struct SourceSpec {
  SourceKind kind = SourceKind::kGaussianEmission;
  std::size_t num_states = 1;
  std::vector<double> initial;  // [K], sums to one
  Mat transition;               // [K,K], row-stochastic

  // gaussian-emission: per-state level and spread
  std::vector<double> means;
  std::vector<double> variances;

  // msar: per-state reversion level, pull and innovation variance
  // (field `means` doubles as the levels)
  std::vector<double> ar_coeffs;
  std::vector<double> innov_variances;

  // state-flow: per-state AR coefficient (ar_coeffs), residual scale and flow
  std::vector<double> scales;
  std::vector<std::vector<FlowLayerSpec>> flows;  // [K][layers]

  // throws std::invalid_argument with a description of the first problem
  void validate() const;

  // first-step law used when sampling: per-state stationary moments (exact
  // for the AR branch, Gaussian-matched for the flow branch)
  double initial_mean(std::size_t k) const;
  double initial_var(std::size_t k) const;
};

// observation map from the n sources to m >= n channels
enum class MixingKind { kLinear, kMlp };

struct MixingSpec {
  MixingKind kind = MixingKind::kLinear;
  double noise_std = 0.0;

  Mat matrix;  // [m,n] for linear mixing

  // one-hidden-layer tanh map for nonlinear mixing; weights are part of the
  // spec so an episode is reproducible from its serialized form
  Mat w1;                   // [hidden,n]
  std::vector<double> b1;   // [hidden]
  Mat w2;                   // [m,hidden]
  std::vector<double> b2;   // [m]

  static MixingSpec linear(Mat m, double noise_std);
  static MixingSpec random_mlp(std::size_t n, std::size_t m, std::size_t hidden, double noise_std,
                               std::uint64_t seed);

  std::size_t observed_dim() const;
  void validate(std::size_t n_sources) const;
};

}  // namespace hmmvae::synth
