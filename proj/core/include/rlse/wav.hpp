// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_WAV_HPP_
#define RLSE_WAV_HPP_

#include <filesystem>
#include <vector>

namespace rlse {

// Time-domain audio. Samples are dimensionless amplitudes, nominally in
// [-1, 1]; disk format is 16-bit PCM mono.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a 16-bit PCM mono WAV file. Rejects anything else (no
// resampling, no stereo downmix, no float formats).
Waveform read_wav(const std::filesystem::path& path);

// Same, but additionally rejects files whose sample rate differs from
// `expected_rate`.
Waveform read_wav(const std::filesystem::path& path, int expected_rate);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] and rounded
// half away from zero; the quantization is pinned so identical inputs
// produce byte-identical files.
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Quantization used by write_wav, exposed for in-memory round trips.
int16_t quantize_sample(double x);

}  // namespace rlse

#endif  // RLSE_WAV_HPP_
