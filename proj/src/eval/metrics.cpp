#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hmmvae::eval {

namespace {

// population (biased) Pearson correlation
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::invalid_argument("match_sources: zero-variance column");
  return sxy / std::sqrt(sxx * syy);
}

void check_labels(const std::vector<int>& labels, std::size_t k, const char* who) {
  for (int c : labels)
    if (c < 1 || static_cast<std::size_t>(c) > k)
      throw std::invalid_argument(std::string(who) + ": state label out of range 1..K");
}

bool diag_dominant(const Mat& m) {
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c)
      if (c != r && !(m(r, r) > m(r, c))) return false;
  return true;
}

void check_row_stochastic(const Mat& m, const char* who) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (m(r, c) < -1e-9)
        throw std::invalid_argument(std::string(who) + ": negative transition entry");
      total += m(r, c);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument(std::string(who) + ": row does not sum to one");
  }
}

}  // namespace

MatchResult match_sources(const Mat& estimated, const Mat& truth) {
  if (estimated.rows != truth.rows || estimated.cols != truth.cols)
    throw std::invalid_argument("match_sources: shape mismatch");
  if (estimated.rows < 2) throw std::invalid_argument("match_sources: need at least two rows");
  const std::size_t n = truth.cols;
  if (n == 0) throw std::invalid_argument("match_sources: no columns");

  // full signed correlation table: corr[e][t]
  std::vector<std::vector<double>> corr(n, std::vector<double>(n));
  for (std::size_t e = 0; e < n; ++e) {
    const auto est_col = estimated.col(e);
    for (std::size_t t = 0; t < n; ++t) corr[e][t] = pearson(est_col, truth.col(t));
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (std::size_t j = 0; j < n; ++j) score += std::abs(corr[perm[j]][j]);
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MatchResult r;
  r.permutation = best;
  r.signs.resize(n);
  r.abs_corr.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = corr[best[j]][j];
    r.signs[j] = c < 0.0 ? -1 : 1;
    r.abs_corr[j] = std::abs(c);
  }
  r.mean_abs_corr = best_score / static_cast<double>(n);
  return r;
}

StateMatchResult match_states(const std::vector<int>& decoded, const std::vector<int>& truth,
                              std::size_t num_states) {
  if (decoded.size() != truth.size() || decoded.empty())
    throw std::invalid_argument("match_states: paths must be non-empty and equal length");
  check_labels(decoded, num_states, "match_states");
  check_labels(truth, num_states, "match_states");
  const std::size_t T = decoded.size();

  std::vector<int> relabel(num_states);
  std::iota(relabel.begin(), relabel.end(), 1);
  std::vector<int> best = relabel;
  std::size_t best_hits = 0;
  bool first = true;
  do {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < T; ++t)
      if (relabel[static_cast<std::size_t>(decoded[t] - 1)] == truth[t]) ++hits;
    if (first || hits > best_hits) {
      best_hits = hits;
      best = relabel;
      first = false;
    }
  } while (std::next_permutation(relabel.begin(), relabel.end()));

  StateMatchResult r;
  r.label_map = best;
  r.accuracy = static_cast<double>(best_hits) / static_cast<double>(T);
  r.confusion = Mat(num_states, num_states, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto row = static_cast<std::size_t>(truth[t] - 1);
    const auto col = static_cast<std::size_t>(best[static_cast<std::size_t>(decoded[t] - 1)] - 1);
    r.confusion(row, col) += 1.0;
  }
  return r;
}

EmpiricalTransitions empirical_transition_matrix(const std::vector<int>& states,
                                                 std::size_t num_states) {
  if (states.size() < 2)
    throw std::invalid_argument("empirical_transition_matrix: need at least two steps");
  check_labels(states, num_states, "empirical_transition_matrix");

  Mat counts(num_states, num_states, 0.0);
  for (std::size_t t = 1; t < states.size(); ++t)
    counts(static_cast<std::size_t>(states[t - 1] - 1),
           static_cast<std::size_t>(states[t] - 1)) += 1.0;

  EmpiricalTransitions out;
  out.matrix = Mat(num_states, num_states, 0.0);
  out.unvisited.assign(num_states, false);
  for (std::size_t a = 0; a < num_states; ++a) {
    double visits = 0.0;
    for (std::size_t b = 0; b < num_states; ++b) visits += counts(a, b);
    if (visits == 0.0) {
      out.unvisited[a] = true;
      for (std::size_t b = 0; b < num_states; ++b)
        out.matrix(a, b) = 1.0 / static_cast<double>(num_states);
    } else {
      for (std::size_t b = 0; b < num_states; ++b) out.matrix(a, b) = counts(a, b) / visits;
    }
  }
  return out;
}

TransitionAgreement transition_agreement(const Mat& learned, const Mat& empirical,
                                         const std::vector<std::size_t>& permutation) {
  const std::size_t k = learned.rows;
  if (learned.cols != k || empirical.rows != k || empirical.cols != k)
    throw std::invalid_argument("transition_agreement: matrices must be square and same size");
  check_row_stochastic(learned, "transition_agreement (learned)");
  check_row_stochastic(empirical, "transition_agreement (empirical)");
  if (permutation.size() != k)
    throw std::invalid_argument("transition_agreement: permutation size mismatch");
  std::vector<bool> seen(k, false);
  for (std::size_t p : permutation) {
    if (p >= k || seen[p])
      throw std::invalid_argument("transition_agreement: permutation is not a bijection");
    seen[p] = true;
  }

  TransitionAgreement r;
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    double tv = 0.0;
    for (std::size_t b = 0; b < k; ++b)
      tv += std::abs(learned(permutation[a], b) - empirical(a, b));
    total += 0.5 * tv;
  }
  r.mean_tv = total / static_cast<double>(k);
  r.learned_diag_dominant = diag_dominant(learned);
  r.empirical_diag_dominant = diag_dominant(empirical);
  return r;
}

}  // namespace hmmvae::eval
