#include "synth/specs.hpp"

#include <cmath>
#include <stdexcept>

#include "synth/linalg.hpp"

namespace hmmvae::synth {

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "gaussian-emission") return SourceKind::kGaussianEmission;
  if (s == "msar") return SourceKind::kMsar;
  if (s == "state-flow") return SourceKind::kStateFlow;
  throw std::invalid_argument("unknown source kind \"" + s +
                              "\" (expected gaussian-emission, msar or state-flow)");
}

std::string source_kind_to_string(SourceKind k) {
  switch (k) {
    case SourceKind::kGaussianEmission: return "gaussian-emission";
    case SourceKind::kMsar: return "msar";
    case SourceKind::kStateFlow: return "state-flow";
  }
  throw std::logic_error("source kind: unreachable");
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_positive(const std::vector<double>& v, std::size_t k, const std::string& name) {
  require(v.size() == k, name + ": expected " + std::to_string(k) + " entries, got " +
                             std::to_string(v.size()));
  for (double x : v) require(x > 0.0, name + ": entries must be positive");
}

}  // namespace

void SourceSpec::validate() const {
  const std::size_t k = num_states;
  require(k >= 1, "source: at least one state required");
  require(initial.size() == k, "source: initial distribution size mismatch");
  double total = 0.0;
  for (double p : initial) {
    require(p >= 0.0, "source: initial probabilities must be non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "source: initial probabilities must sum to one");
  require(transition.rows == k && transition.cols == k, "source: transition matrix must be KxK");
  for (std::size_t r = 0; r < k; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      require(transition(r, c) >= 0.0, "source: transition entries must be non-negative");
      row += transition(r, c);
    }
    require(std::abs(row - 1.0) <= 1e-12,
            "source: transition row " + std::to_string(r + 1) + " must sum to one");
  }

  switch (kind) {
    case SourceKind::kGaussianEmission:
      require(means.size() == k, "gaussian-emission: means size mismatch");
      check_positive(variances, k, "gaussian-emission: variances");
      break;
    case SourceKind::kMsar:
      require(means.size() == k, "msar: levels size mismatch");
      require(ar_coeffs.size() == k, "msar: ar_coeffs size mismatch");
      for (double a : ar_coeffs)
        require(std::abs(a) < 1.0, "msar: ar_coeffs must lie strictly inside (-1, 1)");
      check_positive(innov_variances, k, "msar: innovation variances");
      break;
    case SourceKind::kStateFlow:
      require(ar_coeffs.size() == k, "state-flow: ar_coeffs size mismatch");
      for (double a : ar_coeffs)
        require(std::abs(a) < 1.0, "state-flow: ar_coeffs must lie strictly inside (-1, 1)");
      check_positive(scales, k, "state-flow: scales");
      require(flows.size() == k, "state-flow: one flow per state required");
      for (const auto& f : flows) {
        require(!f.empty(), "state-flow: flows need at least one layer");
        for (const auto& layer : f)
          require(layer.tail_weight > 0.0, "state-flow: tail weights must be positive");
      }
      break;
  }
}

double SourceSpec::initial_mean(std::size_t k) const {
  switch (kind) {
    case SourceKind::kGaussianEmission: return means[k];
    case SourceKind::kMsar: return means[k];
    case SourceKind::kStateFlow: return 0.0;
  }
  throw std::logic_error("initial_mean: unreachable");
}

double SourceSpec::initial_var(std::size_t k) const {
  switch (kind) {
    case SourceKind::kGaussianEmission: return variances[k];
    case SourceKind::kMsar:
      return innov_variances[k] / (1.0 - ar_coeffs[k] * ar_coeffs[k]);
    case SourceKind::kStateFlow:
      return scales[k] * scales[k] / (1.0 - ar_coeffs[k] * ar_coeffs[k]);
  }
  throw std::logic_error("initial_var: unreachable");
}

MixingSpec MixingSpec::linear(Mat m, double noise_std) {
  MixingSpec s;
  s.kind = MixingKind::kLinear;
  s.matrix = std::move(m);
  s.noise_std = noise_std;
  return s;
}

MixingSpec MixingSpec::random_mlp(std::size_t n, std::size_t m, std::size_t hidden,
                                  double noise_std, std::uint64_t seed) {
  MixingSpec s;
  s.kind = MixingKind::kMlp;
  s.noise_std = noise_std;
  Rng rng(seed);
  s.w1 = Mat(hidden, n);
  for (auto& x : s.w1.d) x = rng.normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
  s.b1.assign(hidden, 0.0);
  s.w2 = Mat(m, hidden);
  for (auto& x : s.w2.d) x = rng.normal(0.0, 1.0 / std::sqrt(static_cast<double>(hidden)));
  s.b2.assign(m, 0.0);
  return s;
}

std::size_t MixingSpec::observed_dim() const {
  return kind == MixingKind::kLinear ? matrix.rows : w2.rows;
}

void MixingSpec::validate(std::size_t n_sources) const {
  require(noise_std >= 0.0, "mixing: noise level must be non-negative");
  if (kind == MixingKind::kLinear) {
    require(matrix.cols == n_sources, "mixing: matrix has " + std::to_string(matrix.cols) +
                                          " columns for " + std::to_string(n_sources) +
                                          " sources");
    require(matrix.rows >= n_sources,
            "mixing: need at least as many observed channels as sources");
    require(smallest_singular_value(matrix) > 1e-6,
            "mixing: matrix must have full column rank");
  } else {
    require(w1.cols == n_sources, "mixing: hidden weights disagree with source count");
    require(w1.rows == b1.size(), "mixing: hidden bias size mismatch");
    require(w2.cols == w1.rows, "mixing: output weights disagree with hidden width");
    require(w2.rows == b2.size(), "mixing: output bias size mismatch");
    require(w2.rows >= n_sources,
            "mixing: need at least as many observed channels as sources");
  }
}

}  // namespace hmmvae::synth
