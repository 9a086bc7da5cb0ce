#include <doctest.h>

#include <cmath>

#include "rlse/error.hpp"
#include "rlse/metrics.hpp"
#include "rlse/rng.hpp"

using namespace rlse;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("segmental SNR clamps at 35 dB for identical signals") {
  Rng rng(1);
  Waveform w;
  w.samples.resize(4096);
  for (auto& s : w.samples) s = rng.uniform_real(-0.5, 0.5);
  CHECK(segmental_snr_db(w, w) == doctest::Approx(35.0).epsilon(1e-12));
}

TEST_CASE("segmental SNR matches a hand-computed white-noise case") {
  Rng rng(2);
  Waveform ref, deg;
  ref.samples.resize(1024);
  deg.samples.resize(1024);
  // Constant amplitude reference, known additive error level in every frame.
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    ref.samples[i] = 0.5;
    deg.samples[i] = 0.5 + 0.05;
  }
  // Per frame: 10*log10(0.25 / 0.0025) = 20 dB.
  CHECK(segmental_snr_db(ref, deg) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("segmental SNR clamps at -10 dB and skips silent reference frames") {
  Waveform ref, deg;
  ref.samples.assign(1024, 0.0);
  deg.samples.assign(1024, 0.0);
  // First frame silent in the reference, second carries signal with huge error.
  for (size_t i = 512; i < 1024; ++i) {
    ref.samples[i] = 0.01;
    deg.samples[i] = 0.9;
  }
  CHECK(segmental_snr_db(ref, deg) == doctest::Approx(-10.0).epsilon(1e-12));

  Waveform silent;
  silent.samples.assign(1024, 0.0);
  CHECK_THROWS_AS(segmental_snr_db(silent, deg), DataError);
}

TEST_CASE("log spectral distance is zero on identical inputs and positive otherwise") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(5, 8, 2.0);
  CHECK(log_spectral_distance(a, a) == 0.0);

  Eigen::MatrixXd b = a * std::exp(1.0);
  // Every element differs by log factor 1 -> per-frame L2 = sqrt(8).
  CHECK(log_spectral_distance(a, b) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));

  Eigen::MatrixXd c(4, 8);
  CHECK_THROWS_AS(log_spectral_distance(a, c), DataError);
}

TEST_CASE("relative reduction reproduces the published arithmetic") {
  CHECK(std::fabs(relative_reduction_percent(56.14, 49.18) - 12.40) <= 0.01);
  CHECK(std::fabs(relative_reduction_percent(81.40, 65.75) - 19.23) <= 0.01);
  CHECK(relative_reduction_percent(0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(relative_reduction_percent(0.0, 0.1), DataError);
}

TEST_SUITE_END();
