// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "rlse/error.hpp"
#include "rlse/rng.hpp"

namespace rlse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double formant_gain(double hz, double center, double width) {
  const double d = (hz - center) / width;
  return std::exp(-0.5 * d * d);
}

void normalize_peak(Waveform& w, double peak) {
  double m = 0.0;
  for (const double s : w.samples) m = std::max(m, std::fabs(s));
  if (m > 0.0) {
    const double k = peak / m;
    for (double& s : w.samples) s *= k;
  }
}

}  // namespace

Waveform synth_voice(uint64_t seed, double seconds, int sample_rate) {
  if (!(seconds > 0.0) || sample_rate <= 0) throw DataError("synth_voice: bad duration/rate");
  Rng rng(seed);

  const size_t n = static_cast<size_t>(seconds * sample_rate);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  const double f0_base = rng.uniform_real(100.0, 250.0);
  const double f0_drift = rng.uniform_real(0.1, 0.5);    // Hz of slow pitch wander
  const double vibrato = rng.uniform_real(3.0, 6.0);     // Hz
  const double syllable_rate = rng.uniform_real(2.5, 4.5);
  const double syllable_phase = rng.uniform_real(0.0, kTwoPi);
  const double formant1 = rng.uniform_real(350.0, 800.0);
  const double formant2 = rng.uniform_real(1000.0, 1800.0);

  const int harmonics = 14;
  double phase[harmonics];
  for (int h = 0; h < harmonics; ++h) phase[h] = rng.uniform_real(0.0, kTwoPi);

  // A couple of short pauses per utterance.
  const int pauses = 1 + static_cast<int>(rng.uniform_index(2));
  std::vector<std::pair<size_t, size_t>> gaps;
  for (int g = 0; g < pauses; ++g) {
    const size_t start = static_cast<size_t>(rng.uniform_real(0.15, 0.8) * static_cast<double>(n));
    const size_t len = static_cast<size_t>(rng.uniform_real(0.03, 0.08) * sample_rate);
    gaps.emplace_back(start, std::min(n, start + len));
  }

  double f0_phase = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double f0 = f0_base * (1.0 + 0.08 * std::sin(kTwoPi * f0_drift * t)) +
                      3.0 * std::sin(kTwoPi * vibrato * t);
    f0_phase += kTwoPi * f0 / sample_rate;

    double sample = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      const double hz = f0 * (h + 1);
      if (hz > sample_rate / 2.0) break;
      const double weight = (formant_gain(hz, formant1, 250.0) +
                             0.7 * formant_gain(hz, formant2, 350.0) + 0.08) /
                            (1.0 + 0.35 * h);
      sample += weight * std::sin(f0_phase * (h + 1) + phase[h]);
    }

    double envelope = 0.55 + 0.45 * std::sin(kTwoPi * syllable_rate * t + syllable_phase);
    envelope *= envelope;  // sharpen syllable onsets
    // Attack/decay over the whole utterance.
    const double edge = std::min({1.0, t / 0.05, (seconds - t) / 0.05});
    sample *= envelope * std::max(edge, 0.0);
    w.samples[i] = sample;
  }

  for (const auto& [b, e] : gaps) {
    for (size_t i = b; i < e; ++i) w.samples[i] *= 0.02;
  }

  normalize_peak(w, 0.6);
  return w;
}

Waveform synth_noise(uint64_t seed, double seconds, int sample_rate) {
  if (!(seconds > 0.0) || sample_rate <= 0) throw DataError("synth_noise: bad duration/rate");
  Rng rng(seed);

  const size_t n = static_cast<size_t>(seconds * sample_rate);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  const double wail_rate = rng.uniform_real(1.2, 2.5);   // bursts per second
  const double sweep_rate = rng.uniform_real(0.15, 0.4); // tonal sweep cycles per second
  const double sweep_lo = rng.uniform_real(1500.0, 2000.0);
  const double sweep_hi = rng.uniform_real(2800.0, 4000.0);

  // High-frequency emphasis for the stochastic part: first difference of
  // white noise, mildly smoothed.
  double prev_white = 0.0, smooth = 0.0, tone_phase = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double white = rng.uniform_real(-1.0, 1.0);
    const double hf = white - prev_white;
    prev_white = white;
    smooth = 0.7 * smooth + 0.3 * hf;

    const double sweep_pos = 0.5 - 0.5 * std::cos(kTwoPi * sweep_rate * t);
    const double tone_hz = sweep_lo + (sweep_hi - sweep_lo) * sweep_pos;
    tone_phase += kTwoPi * tone_hz / sample_rate;
    const double tone = std::sin(tone_phase) + 0.4 * std::sin(2.0 * tone_phase);

    double wail = 0.35 + 0.65 * std::pow(0.5 - 0.5 * std::cos(kTwoPi * wail_rate * t), 1.5);
    w.samples[i] = wail * (1.1 * smooth + 0.8 * tone);
  }

  normalize_peak(w, 0.6);
  return w;
}

std::filesystem::path write_demo_dataset(const std::filesystem::path& dir, int utterances,
                                         double seconds_per_utterance, uint64_t seed,
                                         int sample_rate) {
  if (utterances < 1) throw DataError("write_demo_dataset: need at least one utterance");
  const auto clean_dir = dir / "clean";
  std::filesystem::create_directories(clean_dir);

  for (int u = 0; u < utterances; ++u) {
    char name[32];
    std::snprintf(name, sizeof name, "u%03d.wav", u);
    write_wav(clean_dir / name, synth_voice(seed + static_cast<uint64_t>(u) * 101, seconds_per_utterance, sample_rate));
  }

  // Long enough that train and test halves each cover several utterances.
  const double noise_seconds = std::max(4.0 * seconds_per_utterance, 2.5 * seconds_per_utterance * utterances / 2.0);
  write_wav(dir / "noise.wav", synth_noise(seed ^ 0x9e3779b97f4a7c15ull, noise_seconds, sample_rate));
  return dir;
}

}  // namespace rlse
