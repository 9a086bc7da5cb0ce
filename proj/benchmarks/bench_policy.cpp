// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "rlse/cer.hpp"
#include "rlse/codebook.hpp"
#include "rlse/network.hpp"
#include "rlse/rng.hpp"

using namespace rlse;

namespace {

std::vector<IbmVector> random_masks(size_t count, size_t dim, uint64_t seed) {
  Rng rng(seed);
  std::vector<IbmVector> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    BitVector v(dim);
    for (size_t j = 0; j < dim; ++j) v.set(j, rng.uniform_index(2) == 1);
    out.push_back(std::move(v));
  }
  return out;
}

void BM_HammingDistance(benchmark::State& state) {
  const auto masks = random_masks(2, static_cast<size_t>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hamming_distance(masks[0], masks[1]));
  }
}
BENCHMARK(BM_HammingDistance)->Arg(64)->Arg(128)->Arg(1024);

void BM_NearestCluster(benchmark::State& state) {
  const auto masks = random_masks(1, 128, 5);
  Codebook cb;
  cb.centroids = random_masks(32, 128, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nearest_cluster(masks[0], cb));
  }
}
BENCHMARK(BM_NearestCluster);

void BM_KmeansBinary(benchmark::State& state) {
  const auto samples = random_masks(static_cast<size_t>(state.range(0)), 128, 8);
  for (auto _ : state) {
    auto res = kmeans_binary(samples, 32, 11, 100);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_KmeansBinary)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_NetworkForward(benchmark::State& state) {
  const Network net = Network::make({640, 64, 128, 64, 32}, Activation::kSoftmax, 1);
  Rng rng(2);
  Eigen::VectorXd x(640);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform_real(-1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x));
  }
}
BENCHMARK(BM_NetworkForward);

void BM_TrainBatch(benchmark::State& state) {
  Rng rng(9);
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 16; ++s) {
    Eigen::VectorXd x(640), t(32);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform_real(-1, 1);
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = rng.uniform_real(0, 1);
    in.push_back(x);
    tg.push_back(t);
  }
  Network net = Network::make({640, 64, 32}, Activation::kSoftmax, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    train(net, in, tg, cfg);
  }
}
BENCHMARK(BM_TrainBatch);

void BM_CharacterErrorRate(benchmark::State& state) {
  Rng rng(12);
  std::string a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back(static_cast<char>('a' + rng.uniform_index(26)));
    b.push_back(static_cast<char>('a' + rng.uniform_index(26)));
  }
  const Transcript hyp{a}, ref{b};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cer(hyp, ref));
  }
}
BENCHMARK(BM_CharacterErrorRate)->Arg(32)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
