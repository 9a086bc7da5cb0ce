#include <doctest.h>

#include "rlse/error.hpp"
#include "rlse/rng.hpp"
#include "rlse/wav.hpp"

#include "test_util.hpp"

#include <fstream>

using namespace rlse;

TEST_SUITE_BEGIN("wav");

TEST_CASE("pcm16 round trip is quantization-exact") {
  rlse_test::TempDir tmp("wav-roundtrip");
  Rng rng(11);
  Waveform w;
  w.samples.resize(2000);
  for (auto& s : w.samples) s = rng.uniform_real(-1.0, 1.0);

  const auto path = tmp.path() / "a.wav";
  write_wav(path, w);
  const Waveform back = read_wav(path, 16000);

  REQUIRE(back.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double expected = quantize_sample(w.samples[i]) / 32767.0;
    CHECK(back.samples[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("quantization clamps and rounds half away from zero") {
  CHECK(quantize_sample(2.0) == 32767);
  CHECK(quantize_sample(-2.0) == -32767);
  CHECK(quantize_sample(0.0) == 0);
  CHECK(quantize_sample(0.5 / 32767.0) == 1);
  CHECK(quantize_sample(-0.5 / 32767.0) == -1);
}

TEST_CASE("sample rate mismatch is rejected") {
  rlse_test::TempDir tmp("wav-rate");
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(100, 0.0);
  const auto path = tmp.path() / "slow.wav";
  write_wav(path, w);
  CHECK_THROWS_AS(read_wav(path, 16000), DataError);
  CHECK(read_wav(path).sample_rate == 8000);
}

TEST_CASE("garbage and truncated files are rejected") {
  rlse_test::TempDir tmp("wav-bad");
  const auto garbage = tmp.path() / "g.wav";
  {
    std::ofstream out(garbage, std::ios::binary);
    out << "definitely not a riff file";
  }
  CHECK_THROWS_AS(read_wav(garbage), DataError);
  CHECK_THROWS_AS(read_wav(tmp.path() / "missing.wav"), DataError);

  // Valid header, truncated data chunk.
  Waveform w;
  w.samples.assign(64, 0.25);
  const auto good = tmp.path() / "good.wav";
  write_wav(good, w);
  std::string bytes = rlse_test::read_file(good);
  bytes.resize(bytes.size() / 2);
  const auto cut = tmp.path() / "cut.wav";
  {
    std::ofstream out(cut, std::ios::binary);
    out << bytes;
  }
  CHECK_THROWS_AS(read_wav(cut), DataError);
}

TEST_SUITE_END();
