// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/mel.hpp"

#include <cmath>

#include "rlse/error.hpp"

namespace rlse {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank make_mel_filterbank(int n_mels, int bins, int sample_rate) {
  if (n_mels < 1 || bins < 2 || sample_rate <= 0) {
    throw DataError("make_mel_filterbank: bad dimensions (n_mels=" + std::to_string(n_mels) +
                    " bins=" + std::to_string(bins) + " rate=" + std::to_string(sample_rate) + ")");
  }
  const double nyquist = sample_rate / 2.0;
  const int fft_size = 2 * (bins - 1);
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;

  // n_mels + 2 edge points equally spaced on the mel axis.
  std::vector<double> edges_hz(static_cast<size_t>(n_mels) + 2);
  const double mel_max = hz_to_mel(nyquist);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges_hz[static_cast<size_t>(i)] = mel_to_hz(mel_max * i / (n_mels + 1));
  }

  MelFilterbank fb;
  fb.weights = Eigen::MatrixXd::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges_hz[static_cast<size_t>(m)];
    const double mid = edges_hz[static_cast<size_t>(m) + 1];
    const double hi = edges_hz[static_cast<size_t>(m) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f < mid) {
        w = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb.weights(m, k) = w;
    }
    if (fb.weights.row(m).maxCoeff() <= 0.0) {
      throw DataError("make_mel_filterbank: band " + std::to_string(m) +
                      " covers no FFT bin; reduce n_mels or raise the FFT size");
    }
  }

  fb.dominant_band.resize(static_cast<size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    int best = 0;
    double best_w = fb.weights(0, k);
    for (int m = 1; m < n_mels; ++m) {
      if (fb.weights(m, k) > best_w) {
        best_w = fb.weights(m, k);
        best = m;
      }
    }
    fb.dominant_band[static_cast<size_t>(k)] = best;
  }
  return fb;
}

Eigen::MatrixXd mel_power(const ComplexSpectrogram& spec, const MelFilterbank& fb) {
  if (spec.bins() != fb.bins()) {
    throw DataError("mel_power: spectrogram has " + std::to_string(spec.bins()) +
                    " bins, filterbank expects " + std::to_string(fb.bins()));
  }
  const Eigen::MatrixXd power = spec.values.cwiseAbs2();
  return power * fb.weights.transpose();  // frames x n_mels
}

std::vector<uint8_t> project_mask_to_linear(const std::vector<uint8_t>& mel_mask,
                                            const MelFilterbank& fb) {
  if (static_cast<int>(mel_mask.size()) != fb.n_mels()) {
    throw DataError("project_mask_to_linear: mask has " + std::to_string(mel_mask.size()) +
                    " bands, filterbank has " + std::to_string(fb.n_mels()));
  }
  std::vector<uint8_t> out(static_cast<size_t>(fb.bins()));
  for (int k = 0; k < fb.bins(); ++k) {
    out[static_cast<size_t>(k)] = mel_mask[static_cast<size_t>(fb.dominant_band[static_cast<size_t>(k)])];
  }
  return out;
}

}  // namespace rlse
