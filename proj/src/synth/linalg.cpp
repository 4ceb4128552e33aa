#include "synth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hmmvae::synth {

double smallest_singular_value(const Mat& m) {
  if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("singular values: empty matrix");
  const std::size_t n = m.cols;
  // gram matrix S = M^T M
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m.rows; ++r) acc += m(r, i) * m(r, j);
      s[i * n + j] = acc;
    }

  // cyclic Jacobi sweeps annihilate off-diagonal entries
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += s[p * n + q] * s[p * n + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (s[q * n + q] - s[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double cs = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double sip = s[i * n + p], siq = s[i * n + q];
          s[i * n + p] = c * sip - cs * siq;
          s[i * n + q] = cs * sip + c * siq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double spi = s[p * n + i], sqi = s[q * n + i];
          s[p * n + i] = c * spi - cs * sqi;
          s[q * n + i] = cs * spi + c * sqi;
        }
      }
  }

  double min_eig = s[0];
  for (std::size_t i = 1; i < n; ++i) min_eig = std::min(min_eig, s[i * n + i]);
  return std::sqrt(std::max(min_eig, 0.0));
}

}  // namespace hmmvae::synth
