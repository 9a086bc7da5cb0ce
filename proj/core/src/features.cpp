// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/features.hpp"

#include "rlse/error.hpp"

namespace rlse {

FeatureExtractor::FeatureExtractor(const ExperimentConfig& cfg)
    : cfg_(cfg), fb_(make_mel_filterbank(cfg.n_mels, cfg.stft.bins(), cfg.sample_rate)) {}

Eigen::MatrixXd FeatureExtractor::mps(const Waveform& w) const {
  if (w.sample_rate != cfg_.sample_rate) {
    throw DataError("FeatureExtractor: waveform rate " + std::to_string(w.sample_rate) +
                    " != configured " + std::to_string(cfg_.sample_rate));
  }
  return mel_power(stft(w, cfg_.stft), fb_);
}

std::vector<Eigen::VectorXd> FeatureExtractor::mask_basis(const ChunkSequence& cs) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(cs.chunks.size());
  if (!cfg_.shared_mask || cs.p == 1) {
    for (const auto& c : cs.chunks) out.push_back(c);
    return out;
  }
  for (const auto& c : cs.chunks) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(cs.n_mels);
    for (int j = 0; j < cs.p; ++j) sum += c.segment(j * cs.n_mels, cs.n_mels);
    out.push_back(std::move(sum));
  }
  return out;
}

std::vector<IbmVector> FeatureExtractor::oracle_chunk_masks(const Eigen::MatrixXd& clean_mps,
                                                            const Eigen::MatrixXd& noise_mps) const {
  const auto clean_basis = mask_basis(chunks(clean_mps));
  const auto noise_basis = mask_basis(chunks(noise_mps));
  if (clean_basis.size() != noise_basis.size()) {
    throw DataError("oracle_chunk_masks: clean/noise chunk counts differ");
  }
  std::vector<IbmVector> out;
  out.reserve(clean_basis.size());
  for (size_t c = 0; c < clean_basis.size(); ++c) {
    out.push_back(compute_ibm(clean_basis[c], noise_basis[c]));
  }
  return out;
}

Eigen::VectorXd FeatureExtractor::apply_chunk_mask(const Eigen::VectorXd& noisy_chunk,
                                                   const BitVector& mask) const {
  if (static_cast<int>(mask.size()) == cfg_.p * cfg_.n_mels) {
    return apply_mask(noisy_chunk, mask);
  }
  if (static_cast<int>(mask.size()) != cfg_.n_mels) {
    throw DataError("apply_chunk_mask: mask dimension " + std::to_string(mask.size()) +
                    " matches neither chunk nor band count");
  }
  // Shared mask: replicate across the p frames of the chunk.
  Eigen::VectorXd out(noisy_chunk.size());
  for (int j = 0; j < cfg_.p; ++j) {
    for (int m = 0; m < cfg_.n_mels; ++m) {
      const int i = j * cfg_.n_mels + m;
      out[i] = mask.get(static_cast<size_t>(m)) ? noisy_chunk[i] : 0.0;
    }
  }
  return out;
}

Waveform FeatureExtractor::enhance_with_masks(
    const Waveform& noisy, const std::vector<const BitVector*>& chunk_masks) const {
  const ComplexSpectrogram spec = stft(noisy, cfg_.stft);
  const int frames = spec.frames();
  const int chunk_count = (frames + cfg_.p - 1) / cfg_.p;
  if (static_cast<int>(chunk_masks.size()) != chunk_count) {
    throw DataError("enhance_with_masks: " + std::to_string(chunk_masks.size()) +
                    " masks for " + std::to_string(chunk_count) + " chunks");
  }

  Eigen::MatrixXd gains(frames, spec.bins());
  std::vector<uint8_t> mel_mask(static_cast<size_t>(cfg_.n_mels));
  for (int f = 0; f < frames; ++f) {
    const int c = f / cfg_.p;
    const BitVector& mask = *chunk_masks[static_cast<size_t>(c)];
    const bool shared = static_cast<int>(mask.size()) == cfg_.n_mels;
    const int offset = shared ? 0 : (f - c * cfg_.p) * cfg_.n_mels;
    for (int m = 0; m < cfg_.n_mels; ++m) {
      mel_mask[static_cast<size_t>(m)] = mask.get(static_cast<size_t>(offset + m)) ? 1 : 0;
    }
    const auto linear = project_mask_to_linear(mel_mask, fb_);
    for (int k = 0; k < spec.bins(); ++k) gains(f, k) = linear[static_cast<size_t>(k)];
  }

  Waveform out = reconstruct(spec, gains, cfg_.stft, noisy.sample_rate);
  out.samples.resize(noisy.samples.size(), 0.0);  // keep the input duration
  return out;
}

}  // namespace rlse
