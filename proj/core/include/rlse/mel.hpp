// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_MEL_HPP_
#define RLSE_MEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rlse/stft.hpp"

namespace rlse {

// Power values below this are clamped before any log. Keeps silence
// frames out of -inf territory throughout the feature pipeline.
constexpr double kLogFloor = 1e-10;

inline double floored_log(double x) { return std::log(x < kLogFloor ? kLogFloor : x); }

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters, unit peak (area-unnormalized), spanning 0 Hz to
// Nyquist on the mel scale.
struct MelFilterbank {
  Eigen::MatrixXd weights;          // n_mels x bins
  std::vector<int> dominant_band;   // per bin: band with the largest weight, ties to lower index

  int n_mels() const { return static_cast<int>(weights.rows()); }
  int bins() const { return static_cast<int>(weights.cols()); }
};

MelFilterbank make_mel_filterbank(int n_mels, int bins, int sample_rate);

// Mel power spectrogram: frames x n_mels, entry = sum_k weight(m,k) * |X(t,k)|^2.
Eigen::MatrixXd mel_power(const ComplexSpectrogram& spec, const MelFilterbank& fb);

// Lifts a per-band binary mel mask to linear frequency: each STFT bin
// takes the mask value of its dominant band.
std::vector<uint8_t> project_mask_to_linear(const std::vector<uint8_t>& mel_mask,
                                            const MelFilterbank& fb);

}  // namespace rlse

#endif  // RLSE_MEL_HPP_
