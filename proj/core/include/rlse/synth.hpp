// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_SYNTH_HPP_
#define RLSE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>

#include "rlse/wav.hpp"

namespace rlse {

// Speech-like harmonic signal: drifting f0 around 100-250 Hz, formant
// shaping, syllabic amplitude modulation, short pauses. Deterministic
// per seed.
Waveform synth_voice(uint64_t seed, double seconds, int sample_rate = 16000);

// Wailing interferer: band-emphasized noise plus a slow tonal sweep in
// the 1.5-4 kHz range with strong amplitude modulation. Spectrally
// concentrated above the voice harmonics so binary masking has room to
// work. Deterministic per seed.
Waveform synth_noise(uint64_t seed, double seconds, int sample_rate = 16000);

// Writes clean/u###.wav files plus one noise.wav long enough for
// disjoint train/test halves. Returns the dataset directory.
std::filesystem::path write_demo_dataset(const std::filesystem::path& dir, int utterances,
                                         double seconds_per_utterance, uint64_t seed,
                                         int sample_rate = 16000);

}  // namespace rlse

#endif  // RLSE_SYNTH_HPP_
