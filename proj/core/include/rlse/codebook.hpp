// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_CODEBOOK_HPP_
#define RLSE_CODEBOOK_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rlse/mask.hpp"

namespace rlse {

// The clustered binary-mask ensemble: one centroid per action index.
struct Codebook {
  std::vector<BitVector> centroids;
  uint64_t seed = 0;
  int iterations = 0;

  int size() const { return static_cast<int>(centroids.size()); }
  int dim() const { return centroids.empty() ? 0 : static_cast<int>(centroids.front().size()); }
};

struct KmeansResult {
  Codebook codebook;
  std::vector<int> assignment;             // per sample, final cluster index
  std::vector<uint64_t> objective_history; // total within-cluster Hamming distance per iteration
};

// Per-bit majority vote over the members, ties to 1. Minimizes the total
// Hamming distance to the members; the k-means update step.
BitVector majority_vote(const std::vector<const IbmVector*>& members);

// Lloyd iteration under Hamming distance:
//   init      seeded uniform draw of cluster_count distinct samples
//             (distinct as vectors when possible)
//   assign    nearest centroid, ties to the lowest index
//   update    per-bit majority vote, ties to 1
//   empty     re-seed from the sample farthest from its own centroid
// Stops at an assignment fixpoint or after max_iter rounds. The
// objective is checked to be non-increasing every iteration.
KmeansResult kmeans_binary(const std::vector<IbmVector>& samples, int cluster_count,
                           uint64_t seed, int max_iter = 100);

// argmin over centroids of Hamming distance, ties to the lowest index.
int nearest_cluster(const BitVector& v, const Codebook& cb);

// Centroid for action index a (0-based); rejects out-of-range indices.
const BitVector& select_mask(const Codebook& cb, int a);

// Versioned text format, bit-exact across platforms.
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace rlse

#endif  // RLSE_CODEBOOK_HPP_
