// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_MASK_HPP_
#define RLSE_MASK_HPP_

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <vector>

#include "rlse/error.hpp"

namespace rlse {

// Fixed-size packed bit vector. Trailing bits of the last block are kept
// zero so popcount-based distances stay exact.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t n) : size_(n), blocks_((n + 63) / 64, 0) {}

  static BitVector from_bools(const std::vector<uint8_t>& bits) {
    BitVector v(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) v.set(i, true);
    }
    return v;
  }

  size_t size() const { return size_; }

  bool get(size_t i) const { return (blocks_[i >> 6] >> (i & 63)) & 1; }

  void set(size_t i, bool value) {
    const uint64_t bit = uint64_t{1} << (i & 63);
    if (value) {
      blocks_[i >> 6] |= bit;
    } else {
      blocks_[i >> 6] &= ~bit;
    }
  }

  size_t count_ones() const {
    size_t c = 0;
    for (const uint64_t b : blocks_) c += static_cast<size_t>(std::popcount(b));
    return c;
  }

  std::vector<uint8_t> to_bools() const {
    std::vector<uint8_t> out(size_);
    for (size_t i = 0; i < size_; ++i) out[i] = get(i) ? 1 : 0;
    return out;
  }

  bool operator==(const BitVector& other) const {
    return size_ == other.size_ && blocks_ == other.blocks_;
  }

  const std::vector<uint64_t>& blocks() const { return blocks_; }

 private:
  size_t size_ = 0;
  std::vector<uint64_t> blocks_;
};

// Binary filter over one chunk vector: bit set where clean power
// dominates noise power.
using IbmVector = BitVector;

// Number of differing bit positions. Rejects mismatched dimensions.
size_t hamming_distance(const BitVector& a, const BitVector& b);

// bit = 1 where log(clean) - log(noise) >= 0 after the 1e-10 power
// floor; the step function maps 0 to 1 (speech retained at equality).
IbmVector compute_ibm(const Eigen::VectorXd& clean, const Eigen::VectorXd& noise);

// Elementwise product of a chunk vector with a binary mask.
Eigen::VectorXd apply_mask(const Eigen::VectorXd& noisy, const BitVector& mask);

}  // namespace rlse

#endif  // RLSE_MASK_HPP_
