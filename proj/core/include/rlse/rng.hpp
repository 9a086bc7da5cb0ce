// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_RNG_HPP_
#define RLSE_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "rlse/error.hpp"

namespace rlse {

// Seeded RNG with pinned derivation of every distribution we use.
// std::uniform_*_distribution output is implementation-defined, so all
// draws are derived from raw mt19937_64 words here; two builds with the
// same seed produce identical streams.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n) by rejection sampling, unbiased.
  uint64_t uniform_index(uint64_t n) {
    if (n == 0) throw Error("Rng::uniform_index: n must be > 0");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [lo, hi) with 53-bit resolution.
  double uniform_real(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Fisher-Yates with pinned index draws.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices drawn uniformly from [0, n) without replacement,
  // in draw order (partial Fisher-Yates).
  std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
    if (k > n) throw Error("Rng::sample_without_replacement: k > n");
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(uniform_index(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rlse

#endif  // RLSE_RNG_HPP_
