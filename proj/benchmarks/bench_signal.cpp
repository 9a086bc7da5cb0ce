// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "rlse/metrics.hpp"
#include "rlse/pipeline.hpp"
#include "rlse/rng.hpp"
#include "rlse/synth.hpp"

using namespace rlse;

namespace {

Waveform bench_waveform(size_t samples) {
  Rng rng(1);
  Waveform w;
  w.samples.resize(samples);
  for (auto& s : w.samples) s = rng.uniform_real(-0.8, 0.8);
  return w;
}

void BM_Stft(benchmark::State& state) {
  const StftConfig cfg;
  const Waveform w = bench_waveform(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    auto spec = stft(w, cfg);
    benchmark::DoNotOptimize(spec);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Stft)->Arg(16000)->Arg(64000);

void BM_StftRoundTrip(benchmark::State& state) {
  const StftConfig cfg;
  const Waveform w = bench_waveform(16000);
  for (auto _ : state) {
    auto back = istft(stft(w, cfg), cfg, w.sample_rate);
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_StftRoundTrip);

void BM_MelPower(benchmark::State& state) {
  const StftConfig cfg;
  const Waveform w = bench_waveform(16000);
  const auto spec = stft(w, cfg);
  const auto fb = make_mel_filterbank(64, cfg.bins(), 16000);
  for (auto _ : state) {
    auto mps = mel_power(spec, fb);
    benchmark::DoNotOptimize(mps);
  }
}
BENCHMARK(BM_MelPower);

void BM_OracleEnhance(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.resolve();
  const FeatureExtractor fx(cfg);
  const Waveform clean = synth_voice(3, 1.0);
  const Waveform noise = synth_noise(4, 1.0);
  Waveform noisy = clean;
  for (size_t i = 0; i < noisy.samples.size(); ++i) noisy.samples[i] += 0.5 * noise.samples[i];
  for (auto _ : state) {
    auto out = enhance_with_oracle_ibm(noisy, clean, noise, fx);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_OracleEnhance);

void BM_SegmentalSnr(benchmark::State& state) {
  const Waveform a = bench_waveform(32000);
  Waveform b = a;
  for (auto& s : b.samples) s *= 0.8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(segmental_snr_db(a, b));
  }
}
BENCHMARK(BM_SegmentalSnr);

}  // namespace
