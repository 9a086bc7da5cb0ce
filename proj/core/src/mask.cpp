// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/mask.hpp"

#include "rlse/mel.hpp"

namespace rlse {

size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw DataError("hamming_distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  size_t d = 0;
  const auto& ab = a.blocks();
  const auto& bb = b.blocks();
  for (size_t i = 0; i < ab.size(); ++i) {
    d += static_cast<size_t>(std::popcount(ab[i] ^ bb[i]));
  }
  return d;
}

IbmVector compute_ibm(const Eigen::VectorXd& clean, const Eigen::VectorXd& noise) {
  if (clean.size() != noise.size()) {
    throw DataError("compute_ibm: dimension mismatch (" + std::to_string(clean.size()) + " vs " +
                    std::to_string(noise.size()) + ")");
  }
  IbmVector mask(static_cast<size_t>(clean.size()));
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    if (floored_log(clean[i]) - floored_log(noise[i]) >= 0.0) {
      mask.set(static_cast<size_t>(i), true);
    }
  }
  return mask;
}

Eigen::VectorXd apply_mask(const Eigen::VectorXd& noisy, const BitVector& mask) {
  if (static_cast<size_t>(noisy.size()) != mask.size()) {
    throw DataError("apply_mask: dimension mismatch (" + std::to_string(noisy.size()) + " vs " +
                    std::to_string(mask.size()) + ")");
  }
  Eigen::VectorXd out(noisy.size());
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    out[i] = mask.get(static_cast<size_t>(i)) ? noisy[i] : 0.0;
  }
  return out;
}

}  // namespace rlse
