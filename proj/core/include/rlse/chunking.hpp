// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_CHUNKING_HPP_
#define RLSE_CHUNKING_HPP_

#include <Eigen/Dense>
#include <vector>

namespace rlse {

// C chunk vectors, each the concatenation of p consecutive spectrogram
// frames (dimension p * n_mels). When the frame count is not a multiple
// of p, the last frame is repeated to fill the final chunk.
struct ChunkSequence {
  int p = 1;
  int n_mels = 0;
  std::vector<Eigen::VectorXd> chunks;

  int count() const { return static_cast<int>(chunks.size()); }
  int dim() const { return p * n_mels; }
};

ChunkSequence make_chunks(const Eigen::MatrixXd& mps, int p);

// Context vector for chunk c: chunks c-F+1 .. c concatenated, missing
// leading chunks filled by repeating chunk 0. Dimension F * p * n_mels.
std::vector<Eigen::VectorXd> make_context(const ChunkSequence& cs, int context_chunks);

// Inverse of make_chunks up to padding: a frames x n_mels matrix with
// count * p rows.
Eigen::MatrixXd flatten_chunks(const ChunkSequence& cs);

}  // namespace rlse

#endif  // RLSE_CHUNKING_HPP_
