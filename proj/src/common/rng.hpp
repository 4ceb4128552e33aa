#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hmmvae {

// SplitMix64 stream. One 64-bit word of state, so checkpointing the generator
// is just saving that word. All draws are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Marsaglia polar rejection; no cached spare, so the
  // stream state never hides a pending value
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // inverse-CDF draw from a finite distribution; weights must be non-negative
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: weights sum to zero");
    const double r = uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      cum += weights[i];
      if (r < cum) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

}  // namespace hmmvae
