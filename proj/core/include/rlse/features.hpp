// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_FEATURES_HPP_
#define RLSE_FEATURES_HPP_

#include <Eigen/Dense>
#include <vector>

#include "rlse/chunking.hpp"
#include "rlse/codebook.hpp"
#include "rlse/config.hpp"
#include "rlse/mask.hpp"
#include "rlse/mel.hpp"
#include "rlse/stft.hpp"
#include "rlse/wav.hpp"

namespace rlse {

// Everything between a waveform and the network/codebook spaces, with
// the filterbank built once. Pure functions over immutable state;
// parallel-safe across utterances.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const MelFilterbank& filterbank() const { return fb_; }

  Eigen::MatrixXd mps(const Waveform& w) const;
  ChunkSequence chunks(const Eigen::MatrixXd& mps) const { return make_chunks(mps, cfg_.p); }
  std::vector<Eigen::VectorXd> contexts(const ChunkSequence& cs) const {
    return make_context(cs, cfg_.context_chunks);
  }

  // Vectors the binary masks live over: the chunk itself, or per-band
  // power sums across the chunk's frames in shared-mask mode.
  std::vector<Eigen::VectorXd> mask_basis(const ChunkSequence& cs) const;

  // Oracle IBM per chunk from clean and true-noise spectrograms.
  std::vector<IbmVector> oracle_chunk_masks(const Eigen::MatrixXd& clean_mps,
                                            const Eigen::MatrixXd& noise_mps) const;

  // Chunk-dimension mel mask (replicates the shared mask across the p
  // frames when needed), for mel-domain enhancement.
  Eigen::VectorXd apply_chunk_mask(const Eigen::VectorXd& noisy_chunk,
                                   const BitVector& mask) const;

  // Full waveform path: per-chunk masks -> per-frame mel masks ->
  // dominant-band linear masks -> masked resynthesis with the noisy
  // phase. Output is padded with zeros to the input length.
  Waveform enhance_with_masks(const Waveform& noisy,
                              const std::vector<const BitVector*>& chunk_masks) const;

 private:
  ExperimentConfig cfg_;
  MelFilterbank fb_;
};

}  // namespace rlse

#endif  // RLSE_FEATURES_HPP_
