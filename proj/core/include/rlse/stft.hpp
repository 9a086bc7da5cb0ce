// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_STFT_HPP_
#define RLSE_STFT_HPP_

#include <Eigen/Dense>

#include "rlse/wav.hpp"

namespace rlse {

enum class Window {
  kHann,  // periodic Hann, 0.5 - 0.5*cos(2*pi*n/N)
  kRect,
};

struct StftConfig {
  int frame_length = 512;  // 32 ms at 16 kHz
  int hop = 256;           // 16 ms at 16 kHz
  Window window = Window::kHann;

  int bins() const { return frame_length / 2 + 1; }
  // Throws DataError unless 0 < hop <= frame_length and frame_length is even.
  void validate() const;
};

// frames x bins complex STFT matrix.
struct ComplexSpectrogram {
  Eigen::MatrixXcd values;

  int frames() const { return static_cast<int>(values.rows()); }
  int bins() const { return static_cast<int>(values.cols()); }
};

Eigen::VectorXd make_window(const StftConfig& cfg);

// Analysis. frames = 1 + floor((len - frame_length)/hop); rejects
// waveforms shorter than one frame.
ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add synthesis with the analysis window reapplied and
// pointwise normalization by the accumulated squared window. Exact on
// every sample with meaningful window coverage; the reconstruction
// tapers only in the first/last frame edges.
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, int sample_rate);

// Applies one linear-frequency gain row per frame (binary masks in this
// codebase) to the noisy spectrogram and resynthesizes. The noisy phase
// is reused: gains are real, so magnitude scaling preserves phase.
Waveform reconstruct(const ComplexSpectrogram& noisy, const Eigen::MatrixXd& per_frame_gains,
                     const StftConfig& cfg, int sample_rate);

}  // namespace rlse

#endif  // RLSE_STFT_HPP_
