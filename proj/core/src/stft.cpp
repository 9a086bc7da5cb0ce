// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <vector>

#include "rlse/error.hpp"

namespace rlse {

namespace {
// Below this accumulated window-squared mass the sample is considered
// uncovered and synthesized as 0 instead of being amplified.
constexpr double kCoverageFloor = 1e-8;
}  // namespace

void StftConfig::validate() const {
  if (frame_length <= 0 || frame_length % 2 != 0) {
    throw DataError("StftConfig: frame_length must be positive and even, got " +
                    std::to_string(frame_length));
  }
  if (hop <= 0 || hop > frame_length) {
    throw DataError("StftConfig: need 0 < hop <= frame_length, got hop=" + std::to_string(hop) +
                    " frame_length=" + std::to_string(frame_length));
  }
}

Eigen::VectorXd make_window(const StftConfig& cfg) {
  cfg.validate();
  Eigen::VectorXd w(cfg.frame_length);
  switch (cfg.window) {
    case Window::kHann:
      for (int i = 0; i < cfg.frame_length; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.frame_length);
      }
      break;
    case Window::kRect:
      w.setOnes();
      break;
  }
  return w;
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(w.samples.size());
  if (n < cfg.frame_length) {
    throw DataError("stft: waveform has " + std::to_string(n) + " samples, need at least " +
                    std::to_string(cfg.frame_length));
  }

  const int frames = 1 + (n - cfg.frame_length) / cfg.hop;
  const int bins = cfg.bins();
  const Eigen::VectorXd window = make_window(cfg);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  ComplexSpectrogram spec;
  spec.values.resize(frames, bins);

  std::vector<double> frame(cfg.frame_length);
  std::vector<std::complex<double>> spectrum;
  for (int m = 0; m < frames; ++m) {
    const int start = m * cfg.hop;
    for (int i = 0; i < cfg.frame_length; ++i) {
      frame[i] = w.samples[start + i] * window[i];
    }
    fft.fwd(spectrum, frame);
    for (int k = 0; k < bins; ++k) spec.values(m, k) = spectrum[k];
  }
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, int sample_rate) {
  cfg.validate();
  if (spec.bins() != cfg.bins()) {
    throw DataError("istft: spectrogram has " + std::to_string(spec.bins()) + " bins, config implies " +
                    std::to_string(cfg.bins()));
  }
  if (spec.frames() == 0) throw DataError("istft: empty spectrogram");

  const int frames = spec.frames();
  const int out_len = (frames - 1) * cfg.hop + cfg.frame_length;
  const Eigen::VectorXd window = make_window(cfg);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(out_len);
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(out_len);

  std::vector<std::complex<double>> spectrum(static_cast<size_t>(cfg.bins()));
  std::vector<double> frame;
  for (int m = 0; m < frames; ++m) {
    for (int k = 0; k < cfg.bins(); ++k) spectrum[static_cast<size_t>(k)] = spec.values(m, k);
    fft.inv(frame, spectrum, cfg.frame_length);
    const int start = m * cfg.hop;
    for (int i = 0; i < cfg.frame_length; ++i) {
      acc[start + i] += frame[i] * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }

  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(out_len);
  for (int i = 0; i < out_len; ++i) {
    out.samples[i] = norm[i] > kCoverageFloor ? acc[i] / norm[i] : 0.0;
  }
  return out;
}

Waveform reconstruct(const ComplexSpectrogram& noisy, const Eigen::MatrixXd& per_frame_gains,
                     const StftConfig& cfg, int sample_rate) {
  if (per_frame_gains.rows() != noisy.values.rows()) {
    throw DataError("reconstruct: " + std::to_string(per_frame_gains.rows()) + " gain rows for " +
                    std::to_string(noisy.frames()) + " frames");
  }
  if (per_frame_gains.cols() != noisy.values.cols()) {
    throw DataError("reconstruct: gain row dimension " + std::to_string(per_frame_gains.cols()) +
                    " != " + std::to_string(noisy.bins()) + " bins");
  }
  ComplexSpectrogram masked;
  masked.values = noisy.values.cwiseProduct(per_frame_gains.cast<std::complex<double>>());
  return istft(masked, cfg, sample_rate);
}

}  // namespace rlse
