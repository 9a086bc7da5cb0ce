#include <doctest.h>

#include <cmath>
#include <set>

#include "rlse/metrics.hpp"
#include "rlse/pipeline.hpp"
#include "rlse/synth.hpp"

#include "test_util.hpp"

using namespace rlse;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.seed = 21;
  cfg.p = 2;
  cfg.context_chunks = 3;
  cfg.clusters = 8;
  cfg.pretrain_epochs = 4;
  cfg.rl_epochs = 2;
  cfg.test_fraction = 0.25;
  cfg.resolve();
  return cfg;
}

DatasetManifest prepare_tiny(const rlse_test::TempDir& tmp, const ExperimentConfig& cfg,
                             int utterances = 8) {
  const auto data_dir = tmp.path() / "data";
  write_demo_dataset(data_dir, utterances, 0.8, cfg.seed);
  ExperimentPaths paths{tmp.path() / "exp"};
  std::filesystem::create_directories(paths.root);
  return prepare(cfg, data_dir / "clean", data_dir / "noise.wav", paths, false);
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("mix_at_snr hits the requested ratio") {
  Waveform clean, noise;
  clean.samples.assign(8000, 0.0);
  noise.samples.assign(32000, 0.0);
  Rng rng(4);
  for (auto& s : clean.samples) s = rng.uniform_real(-0.25, 0.25);
  for (auto& s : noise.samples) s = rng.uniform_real(-0.25, 0.25);

  SUBCASE("equal power at 0 dB gives scale 1, at 5 dB gives 10^(-5/20)") {
    // Make the noise pool constant-power by construction: tile the clean.
    Waveform pool;
    pool.samples = clean.samples;
    const MixResult at0 = mix_at_snr(clean, pool, 0.0, 9);
    CHECK(at0.noise_scale == doctest::Approx(1.0).epsilon(1e-9));

    const MixResult at5 = mix_at_snr(clean, pool, 5.0, 9);
    CHECK(at5.noise_scale == doctest::Approx(std::pow(10.0, -5.0 / 20.0)).epsilon(1e-9));
  }

  SUBCASE("measured SNR is within 0.01 dB of the target") {
    for (const double target : {-5.0, 0.0, 5.0, 12.5}) {
      const MixResult mix = mix_at_snr(clean, noise, target, 31);
      double ps = 0.0, pv = 0.0;
      for (size_t i = 0; i < clean.samples.size(); ++i) {
        ps += mix.clean.samples[i] * mix.clean.samples[i];
        pv += mix.noise.samples[i] * mix.noise.samples[i];
      }
      const double measured = 10.0 * std::log10(ps / pv);
      CHECK(std::fabs(measured - target) < 0.01);
      // mixed = clean + noise exactly.
      for (size_t i = 0; i < clean.samples.size(); ++i) {
        CHECK(mix.mixed.samples[i] ==
              doctest::Approx(mix.clean.samples[i] + mix.noise.samples[i]).epsilon(1e-12));
      }
    }
  }

  SUBCASE("silent clean input is rejected") {
    Waveform silent;
    silent.samples.assign(4000, 0.0);
    CHECK_THROWS_AS(mix_at_snr(silent, noise, 5.0, 1), DataError);
  }

  SUBCASE("clipping triggers joint renormalization") {
    Waveform loud = clean;
    for (auto& s : loud.samples) s *= 3.9;
    const MixResult mix = mix_at_snr(loud, noise, -10.0, 7);
    CHECK(mix.norm_scale < 1.0);
    double peak = 0.0;
    for (const double s : mix.mixed.samples) peak = std::max(peak, std::fabs(s));
    CHECK(peak <= 0.999 + 1e-12);
    // SNR is unchanged by the joint rescale.
    double ps = 0.0, pv = 0.0;
    for (size_t i = 0; i < loud.samples.size(); ++i) {
      ps += mix.clean.samples[i] * mix.clean.samples[i];
      pv += mix.noise.samples[i] * mix.noise.samples[i];
    }
    CHECK(std::fabs(10.0 * std::log10(ps / pv) - (-10.0)) < 0.01);
  }
}

TEST_CASE("prepare writes a deterministic, disjoint dataset") {
  const ExperimentConfig cfg = tiny_config();
  rlse_test::TempDir tmp("prepare");
  const DatasetManifest m = prepare_tiny(tmp, cfg);

  const auto train = m.split_records("train");
  const auto test = m.split_records("test");
  CHECK(train.size() == 6);                         // 8 utterances, 25% test
  CHECK(test.size() == 2 * cfg.snr_test_db.size()); // each test utterance at every SNR

  // Noise halves are disjoint and every record stays inside its half.
  CHECK(m.train_noise_end == m.test_noise_begin);
  for (const auto* r : train) {
    CHECK(r->noise_offset >= m.train_noise_begin);
    CHECK(r->noise_offset < m.train_noise_end);
  }
  for (const auto* r : test) {
    CHECK(r->noise_offset >= m.test_noise_begin);
    CHECK(r->noise_offset < m.test_noise_end);
  }

  CHECK(m.lsd_cal > 0.0);

  SUBCASE("noisy training inputs score near pseudo-ER 1 at the calibration point") {
    MockParams params;
    params.stft = cfg.stft;
    params.n_mels = cfg.n_mels;
    params.sample_rate = cfg.sample_rate;
    params.lsd_cal = m.lsd_cal;
    double max_er = 0.0, min_er = 2.0;
    for (const auto* r : train) {
      const double er = mock_error_rate(read_wav(m.resolve(r->mixed), cfg.sample_rate),
                                        read_wav(m.resolve(r->clean), cfg.sample_rate), params);
      max_er = std::max(max_er, er);
      min_er = std::min(min_er, er);
    }
    CHECK(max_er == doctest::Approx(1.0).epsilon(1e-9));  // the percentile row clamps to 1
    CHECK(min_er > 0.5);                                  // same noise source, similar scale
    CHECK(min_er < 1.0);
  }

  // Files exist and have the same duration as the clean source.
  for (const auto& r : m.records) {
    const Waveform clean = read_wav(m.resolve(r.clean), cfg.sample_rate);
    const Waveform mixed = read_wav(m.resolve(r.mixed), cfg.sample_rate);
    const Waveform noise = read_wav(m.resolve(r.noise), cfg.sample_rate);
    CHECK(clean.samples.size() == mixed.samples.size());
    CHECK(clean.samples.size() == noise.samples.size());
  }

  SUBCASE("manifest round trip preserves every field") {
    const DatasetManifest loaded = load_manifest(tmp.path() / "exp" / "manifest.csv");
    REQUIRE(loaded.records.size() == m.records.size());
    CHECK(loaded.lsd_cal == m.lsd_cal);
    CHECK(loaded.train_noise_end == m.train_noise_end);
    for (size_t i = 0; i < m.records.size(); ++i) {
      CHECK(loaded.records[i].id == m.records[i].id);
      CHECK(loaded.records[i].split == m.records[i].split);
      CHECK(loaded.records[i].snr_db == m.records[i].snr_db);
      CHECK(loaded.records[i].noise_scale == m.records[i].noise_scale);
      CHECK(loaded.records[i].norm_scale == m.records[i].norm_scale);
      CHECK(loaded.records[i].noise_offset == m.records[i].noise_offset);
    }
  }

  SUBCASE("re-running with the same seed is byte-identical") {
    rlse_test::TempDir tmp2("prepare-again");
    prepare_tiny(tmp2, cfg);
    const auto a = rlse_test::read_file(tmp.path() / "exp" / "manifest.csv");
    const auto b = rlse_test::read_file(tmp2.path() / "exp" / "manifest.csv");
    CHECK(a == b);
    for (const auto& r : m.records) {
      CHECK(rlse_test::read_file(tmp.path() / "exp" / r.mixed) ==
            rlse_test::read_file(tmp2.path() / "exp" / r.mixed));
    }
  }

  SUBCASE("prepare is idempotent unless forced") {
    ExperimentPaths paths{tmp.path() / "exp"};
    const auto before = rlse_test::read_file(paths.manifest());
    const DatasetManifest again =
        prepare(cfg, tmp.path() / "data" / "clean", tmp.path() / "data" / "noise.wav", paths,
                false);
    CHECK(again.records.size() == m.records.size());
    CHECK(rlse_test::read_file(paths.manifest()) == before);
  }
}

TEST_CASE("codebook building, pretraining and the 1nn baseline work end to end") {
  const ExperimentConfig cfg = tiny_config();
  rlse_test::TempDir tmp("stages");
  const DatasetManifest m = prepare_tiny(tmp, cfg);
  ExperimentPaths paths{tmp.path() / "exp"};

  const KmeansResult km = build_codebook(m, cfg, paths, false);
  CHECK(km.codebook.size() == cfg.clusters);
  CHECK(km.codebook.dim() == cfg.mask_dim());
  for (size_t i = 1; i < km.objective_history.size(); ++i) {
    CHECK(km.objective_history[i] <= km.objective_history[i - 1]);
  }
  const Codebook reloaded = load_codebook(paths.codebook());
  for (int a = 0; a < km.codebook.size(); ++a) {
    CHECK(reloaded.centroids[static_cast<size_t>(a)] ==
          km.codebook.centroids[static_cast<size_t>(a)]);
  }

  const PretrainResult pre = run_pretrain(m, cfg, paths, false);
  CHECK(pre.net.input_dim() == cfg.network_input_dim());
  CHECK(pre.net.output_dim() == cfg.mask_dim());
  CHECK(pre.stats.epoch_loss.back() < pre.stats.epoch_loss.front());

  const FeatureExtractor fx(cfg);
  const NearestNeighborIndex index = build_1nn_index(m, cfg, km.codebook, fx);
  CHECK(index.points.size() == index.labels.size());
  CHECK(index.points.size() > 0);

  SUBCASE("queries match a brute-force scan and stored chunks map to their own label") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd q(index.points.front().size());
      for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = rng.uniform_real(-25.0, 5.0);
      const int got = query_1nn(index, q);
      int best = 0;
      double best_d = (index.points[0] - q).squaredNorm();
      for (size_t i = 1; i < index.points.size(); ++i) {
        const double d = (index.points[i] - q).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      CHECK(got == best);
    }
    // A stored point is its own nearest neighbor.
    CHECK(query_1nn(index, index.points[7]) == 7);
  }

  SUBCASE("1nn enhancement emits a same-duration waveform") {
    const auto* rec = m.split_records("test").front();
    const Waveform noisy = read_wav(m.resolve(rec->mixed), cfg.sample_rate);
    const Waveform out = enhance_1nn(noisy, index, km.codebook, fx);
    CHECK(out.samples.size() == noisy.samples.size());
  }

  SUBCASE("empty index is rejected") {
    NearestNeighborIndex empty;
    CHECK_THROWS_AS(query_1nn(empty, Eigen::VectorXd::Zero(3)), DataError);
  }
}

TEST_CASE("oracle enhancement beats the noisy input on the prepared dataset") {
  const ExperimentConfig cfg = tiny_config();
  rlse_test::TempDir tmp("oracle");
  const DatasetManifest m = prepare_tiny(tmp, cfg);
  const FeatureExtractor fx(cfg);

  double gain = 0.0;
  int counted = 0;
  for (const auto* r : m.split_records("test")) {
    const Waveform clean = read_wav(m.resolve(r->clean), cfg.sample_rate);
    const Waveform noise = read_wav(m.resolve(r->noise), cfg.sample_rate);
    const Waveform noisy = read_wav(m.resolve(r->mixed), cfg.sample_rate);
    const Waveform enhanced = enhance_with_oracle_ibm(noisy, clean, noise, fx);
    gain += segmental_snr_db(clean, enhanced) - segmental_snr_db(clean, noisy);
    ++counted;
  }
  CHECK(counted > 0);
  CHECK(gain / counted >= 3.0);
}

TEST_CASE("evaluate scores through an external recognizer over the wire protocol") {
  ExperimentConfig cfg = tiny_config();
  rlse_test::TempDir tmp("ext-eval");
  const auto data_dir = tmp.path() / "data";
  write_demo_dataset(data_dir, 8, 0.8, cfg.seed);

  // Even-numbered utterances carry the transcript the stub always
  // answers; odd ones differ in two characters.
  std::map<std::string, std::string> transcripts;
  for (int u = 0; u < 8; ++u) {
    char id[8];
    std::snprintf(id, sizeof id, "u%03d", u);
    transcripts[id] = u % 2 == 0 ? "hello world" : "hellx wxrld";
  }

  ExperimentPaths paths{tmp.path() / "exp"};
  std::filesystem::create_directories(paths.root);
  const DatasetManifest m =
      prepare(cfg, data_dir / "clean", data_dir / "noise.wav", paths, false, transcripts);

  RecognizerEndpoint ep;
  ep.kind = RecognizerEndpoint::Kind::kExternal;
  ep.command = std::string(RLSE_STUB_RECOGNIZER_PATH) + " --transcript \"hello world\"";
  ep.timeout_seconds = 10.0;

  const EvalResult res = evaluate(m, cfg, ep, {"noisy"}, paths, false);
  REQUIRE(res.rows.size() == m.split_records("test").size());
  for (const auto& row : res.rows) {
    const int utt = std::stoi(row.id.substr(1));
    const double expected = utt % 2 == 0 ? 0.0 : 0.2;  // 2 substitutions over 10 characters
    CHECK(row.error_rate == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("report reproduces the published relative reductions from canned results") {
  rlse_test::TempDir tmp("report");
  ExperimentPaths paths{tmp.path()};
  // Minimal manifest context for the report call.
  const ExperimentConfig cfg = tiny_config();
  DatasetManifest m;
  m.base_dir = tmp.path();
  m.records.push_back({"u0", "test", 5.0, "", "", "", 1.0, 1.0, 0, ""});

  {
    std::ofstream out(paths.results());
    out << "id,snr_db,system,error_rate,seg_snr_db,lsd\n";
    out << "u0,5,noisy,0.5614,0,0\n";
    out << "u0,5,rlse,0.4918,0,0\n";
    out << "u0,0,noisy,0.8140,0,0\n";
    out << "u0,0,rlse,0.6575,0,0\n";
  }

  const Report rep = report(m, cfg, paths);
  double red5 = 0.0, red0 = 0.0;
  for (const auto& c : rep.conditions) {
    if (c.system == "rlse" && c.snr_db == 5.0) red5 = *c.reduction_vs_noisy_percent;
    if (c.system == "rlse" && c.snr_db == 0.0) red0 = *c.reduction_vs_noisy_percent;
    if (c.system == "noisy") CHECK_FALSE(c.reduction_vs_noisy_percent.has_value());
  }
  CHECK(std::fabs(red5 - 12.40) <= 0.01);
  CHECK(std::fabs(red0 - 19.23) <= 0.01);

  // Identical system and baseline means 0% reduction.
  {
    std::ofstream out(paths.results());
    out << "id,snr_db,system,error_rate,seg_snr_db,lsd\n";
    out << "u0,5,noisy,0.33,0,0\n";
    out << "u0,5,rlse,0.33,0,0\n";
  }
  const Report same = report(m, cfg, paths);
  for (const auto& c : same.conditions) {
    if (c.system == "rlse") CHECK(*c.reduction_vs_noisy_percent == 0.0);
  }
}

TEST_SUITE_END();
