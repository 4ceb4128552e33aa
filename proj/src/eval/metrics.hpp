#pragma once

#include <cstddef>
#include <vector>

#include "common/mat.hpp"

namespace hmmvae::eval {

// Result of matching estimated source columns to ground-truth columns.
struct MatchResult {
  // truth column j is best explained by estimated column permutation[j]
  std::vector<std::size_t> permutation;
  std::vector<int> signs;        // sign of the matched correlation, +1 or -1
  std::vector<double> abs_corr;  // |corr| per truth column, in [0,1]
  double mean_abs_corr = 0.0;
};

// Exhaustive assignment over all n! column permutations maximizing total
// absolute Pearson correlation (population normalization).
// Throws std::invalid_argument on shape mismatch or a zero-variance column.
MatchResult match_sources(const Mat& estimated, const Mat& truth);

// Result of matching decoded state labels to true labels for one source.
struct StateMatchResult {
  // decoded label k (1-based) is relabeled to label_map[k-1]
  std::vector<int> label_map;
  double accuracy = 0.0;  // max over all K! relabelings
  Mat confusion;          // rows: true label, cols: relabeled decoded label
};

// Exhaustive search over K! label permutations; ties resolved in favor of
// the lexicographically first relabeling. Labels must lie in 1..K.
StateMatchResult match_states(const std::vector<int>& decoded, const std::vector<int>& truth,
                              std::size_t num_states);

struct EmpiricalTransitions {
  Mat matrix;                   // [K,K], row-stochastic
  std::vector<bool> unvisited;  // true where the row fell back to uniform
};

// Entry (a,b) = #(a->b transitions) / #(visits to a before the last step);
// rows of never-visited states are uniform and flagged. Needs T >= 2.
EmpiricalTransitions empirical_transition_matrix(const std::vector<int>& states,
                                                 std::size_t num_states);

struct TransitionAgreement {
  double mean_tv = 0.0;  // mean row-wise total-variation distance
  bool learned_diag_dominant = false;
  bool empirical_diag_dominant = false;
};

// Compares learned vs empirical transition matrices after relabeling the
// learned rows: aligned[a][b] = learned[permutation[a]][b]. Both inputs must
// be row-stochastic within 1e-9; permutation is 0-based and bijective.
TransitionAgreement transition_agreement(const Mat& learned, const Mat& empirical,
                                         const std::vector<std::size_t>& permutation);

}  // namespace hmmvae::eval
