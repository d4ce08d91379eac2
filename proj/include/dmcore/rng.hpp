#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>

namespace dmcore {

// Deterministic RNG used everywhere. All randomness flows from one user seed
// through Rng::derive(tag[, index]), so runs are reproducible regardless of
// platform or thread count. SplitMix64 core; good enough for sampling and
// far more portable than <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = (state_ += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    // rejection sampling on the top bits; unbiased
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Index draw from nonnegative weights (at least one positive).
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0.0) return i;
    return 0;
  }

  // Child stream for an independent purpose. The tag keeps streams for
  // different purposes decoupled even under the same user seed.
  Rng derive(std::string_view tag, std::uint64_t index = 0) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    Rng child(state_ ^ h);
    child.state_ ^= 0x9e3779b97f4a7c15ULL * (index + 1);
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

// Truncated exponential on [0, width]: density
//   t -> (chi/(chi-1)) * (ln chi / width) * exp(-t ln chi / width),
// sampled by inverse CDF.
inline double sample_truncated_exponential(Rng& rng, double width, double chi) {
  double u = rng.uniform();
  return -(width / std::log(chi)) * std::log(1.0 - u * (chi - 1.0) / chi);
}

}  // namespace dmcore
