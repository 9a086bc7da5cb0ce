// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rlse/csv.hpp"
#include "rlse/error.hpp"
#include "rlse/metrics.hpp"
#include "rlse/parallel.hpp"
#include "rlse/rng.hpp"

namespace rlse {

namespace {

constexpr double kPeakLimit = 0.999;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
  return splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(b ^ 0x5bf03635ull));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_snr(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr);
  return buf;
}

double mean_power(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const double s : w.samples) acc += s * s;
  return acc / static_cast<double>(w.samples.size());
}

double percentile_95(std::vector<double> values) {
  if (values.empty()) throw DataError("percentile: empty value set");
  std::sort(values.begin(), values.end());
  const size_t idx = static_cast<size_t>(
      std::min<double>(std::ceil(0.95 * static_cast<double>(values.size())),
                       static_cast<double>(values.size()))) - 1;
  return values[idx];
}

MockParams mock_params_for(const ExperimentConfig& cfg, const DatasetManifest& manifest) {
  MockParams p;
  p.stft = cfg.stft;
  p.n_mels = cfg.n_mels;
  p.sample_rate = cfg.sample_rate;
  p.lsd_cal = manifest.lsd_cal;
  return p;
}

RecognizerEndpoint resolved_endpoint(const RecognizerEndpoint& endpoint,
                                     const ExperimentConfig& cfg,
                                     const DatasetManifest& manifest,
                                     const ExperimentPaths& paths) {
  RecognizerEndpoint ep = endpoint;
  ep.mock = mock_params_for(cfg, manifest);
  if (ep.scratch_dir.empty()) ep.scratch_dir = paths.scratch_dir();
  if (ep.timeout_seconds <= 0.0) ep.timeout_seconds = cfg.recognizer_timeout;
  return ep;
}

Reference reference_for(const UtteranceRecord& r, const DatasetManifest& manifest,
                        RecognizerEndpoint::Kind kind) {
  Reference ref;
  if (kind == RecognizerEndpoint::Kind::kMock) {
    ref.clean_wav = manifest.resolve(r.clean);
  } else {
    ref.transcript = r.reference;
  }
  return ref;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write matrix: " + path.string());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_number(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd log_mel_of(const std::filesystem::path& wav, const FeatureExtractor& fx) {
  Eigen::MatrixXd m = fx.mps(read_wav(wav, fx.config().sample_rate));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = floored_log(m(r, c));
  }
  return m;
}

std::vector<EvalRow> load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results: " + path.string());
  std::vector<EvalRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = csv_split(line);
    if (f.size() != 6) throw DataError("results row needs 6 columns: " + line);
    EvalRow row;
    row.id = f[0];
    row.snr_db = std::stod(f[1]);
    row.system = f[2];
    row.error_rate = std::stod(f[3]);
    row.seg_snr_db = std::stod(f[4]);
    row.lsd = std::stod(f[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_results(const std::filesystem::path& path, const std::vector<EvalRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write results: " + path.string());
  out << "id,snr_db,system,error_rate,seg_snr_db,lsd\n";
  for (const auto& r : rows) {
    out << csv_join({r.id, format_snr(r.snr_db), r.system, format_number(r.error_rate),
                     format_number(r.seg_snr_db), format_number(r.lsd)})
        << "\n";
  }
}

int system_rank(const std::string& s) {
  if (s == "noisy") return 0;
  if (s == "1nn") return 1;
  if (s == "rlse") return 2;
  if (s == "oracle") return 3;
  return 4;
}

}  // namespace

std::string enhanced_file_name(const UtteranceRecord& r) {
  return r.id + "__snr" + format_snr(r.snr_db) + ".wav";
}

MixResult mix_at_snr(const Waveform& clean, const Waveform& noise_pool, double snr_db,
                     uint64_t seed) {
  if (clean.samples.empty()) throw DataError("mix_at_snr: empty clean signal");
  if (noise_pool.samples.empty()) throw DataError("mix_at_snr: empty noise signal");
  if (clean.sample_rate != noise_pool.sample_rate) {
    throw DataError("mix_at_snr: sample rate mismatch");
  }
  const double clean_power = mean_power(clean);
  if (clean_power < 1e-12) throw DataError("mix_at_snr: silent clean signal");

  MixResult out;
  Rng rng(seed);
  out.noise_offset = rng.uniform_index(noise_pool.samples.size());

  Waveform segment;
  segment.sample_rate = noise_pool.sample_rate;
  segment.samples.resize(clean.samples.size());
  for (size_t i = 0; i < clean.samples.size(); ++i) {
    segment.samples[i] =
        noise_pool.samples[(out.noise_offset + i) % noise_pool.samples.size()];
  }
  const double noise_power = mean_power(segment);
  if (noise_power < 1e-12) throw DataError("mix_at_snr: silent noise segment");

  out.noise_scale = std::sqrt(clean_power / (noise_power * std::pow(10.0, snr_db / 10.0)));

  out.clean = clean;
  out.noise = segment;
  for (double& s : out.noise.samples) s *= out.noise_scale;

  out.mixed.sample_rate = clean.sample_rate;
  out.mixed.samples.resize(clean.samples.size());
  double peak = 0.0;
  for (size_t i = 0; i < clean.samples.size(); ++i) {
    out.mixed.samples[i] = out.clean.samples[i] + out.noise.samples[i];
    peak = std::max(peak, std::fabs(out.mixed.samples[i]));
  }

  if (peak > kPeakLimit) {
    out.norm_scale = kPeakLimit / peak;
    for (double& s : out.mixed.samples) s *= out.norm_scale;
    for (double& s : out.clean.samples) s *= out.norm_scale;
    for (double& s : out.noise.samples) s *= out.norm_scale;
  }
  return out;
}

std::map<std::string, std::string> load_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcripts: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = csv_split(line);
    if (f.size() != 2) throw DataError("transcript row needs 2 columns: " + line);
    if (f[0] == "id") continue;  // optional header
    out[f[0]] = f[1];
  }
  return out;
}

DatasetManifest prepare(const ExperimentConfig& cfg, const std::filesystem::path& clean_dir,
                        const std::filesystem::path& noise_file, const ExperimentPaths& paths,
                        bool force, const std::map<std::string, std::string>& transcripts) {
  if (std::filesystem::exists(paths.manifest()) && !force) {
    std::cerr << "prepare: " << paths.manifest().string() << " exists, skipping (use --force)\n";
    return load_manifest(paths.manifest());
  }

  if (!std::filesystem::is_directory(clean_dir)) {
    throw DataError("prepare: clean directory not found: " + clean_dir.string());
  }
  std::vector<std::filesystem::path> clean_files;
  for (const auto& entry : std::filesystem::directory_iterator(clean_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      clean_files.push_back(entry.path());
    }
  }
  std::sort(clean_files.begin(), clean_files.end());
  if (clean_files.size() < 2) {
    throw DataError("prepare: need at least 2 clean WAVs, found " +
                    std::to_string(clean_files.size()));
  }

  const Waveform noise_pool = read_wav(noise_file, cfg.sample_rate);
  const size_t half = noise_pool.samples.size() / 2;
  if (half < static_cast<size_t>(cfg.stft.frame_length)) {
    throw DataError("prepare: noise waveform too short to split into halves (" +
                    std::to_string(noise_pool.samples.size()) + " samples)");
  }
  Waveform train_noise{std::vector<double>(noise_pool.samples.begin(),
                                           noise_pool.samples.begin() + static_cast<long>(half)),
                       cfg.sample_rate};
  Waveform test_noise{std::vector<double>(noise_pool.samples.begin() + static_cast<long>(half),
                                          noise_pool.samples.end()),
                      cfg.sample_rate};

  // Seeded test split, at least one utterance on each side.
  const size_t utterance_count = clean_files.size();
  size_t test_count = static_cast<size_t>(
      std::lround(cfg.test_fraction * static_cast<double>(utterance_count)));
  test_count = std::max<size_t>(1, std::min(test_count, utterance_count - 1));
  Rng split_rng(derive_seed(cfg.seed, 0xda7a5e7ull, 1));
  const auto test_sample = split_rng.sample_without_replacement(utterance_count, test_count);
  std::vector<bool> is_test(utterance_count, false);
  for (const size_t i : test_sample) is_test[i] = true;

  struct PlannedRow {
    size_t file_index;
    std::string split;
    double snr_db;
    const Waveform* pool;
    uint64_t pool_offset_base;
  };
  std::vector<PlannedRow> plan;
  for (size_t i = 0; i < utterance_count; ++i) {
    if (!is_test[i]) {
      plan.push_back({i, "train", cfg.snr_train_db, &train_noise, 0});
    } else {
      for (const double snr : cfg.snr_test_db) {
        plan.push_back({i, "test", snr, &test_noise, half});
      }
    }
  }

  std::filesystem::create_directories(paths.root / "data" / "clean");
  std::filesystem::create_directories(paths.root / "data" / "noise");
  std::filesystem::create_directories(paths.root / "data" / "mixed");

  std::vector<UtteranceRecord> records(plan.size());
  std::vector<double> train_lsd(plan.size(), -1.0);
  const FeatureExtractor fx(cfg);

  parallel_for(plan.size(), cfg.jobs, [&](size_t row) {
    const PlannedRow& pr = plan[row];
    const Waveform clean = read_wav(clean_files[pr.file_index], cfg.sample_rate);
    const uint64_t mix_seed = derive_seed(cfg.seed, pr.file_index,
                                          static_cast<uint64_t>(std::llround(pr.snr_db * 100.0)) +
                                              (pr.split == "test" ? 1000000 : 0));
    const MixResult mix = mix_at_snr(clean, *pr.pool, pr.snr_db, mix_seed);

    UtteranceRecord rec;
    rec.id = clean_files[pr.file_index].stem().string();
    rec.split = pr.split;
    rec.snr_db = pr.snr_db;
    const std::string stem = rec.id + "__snr" + format_snr(pr.snr_db) + ".wav";
    rec.clean = "data/clean/" + stem;
    rec.noise = "data/noise/" + stem;
    rec.mixed = "data/mixed/" + stem;
    rec.noise_scale = mix.noise_scale;
    rec.norm_scale = mix.norm_scale;
    rec.noise_offset = pr.pool_offset_base + mix.noise_offset;
    if (const auto it = transcripts.find(rec.id); it != transcripts.end()) {
      rec.reference = it->second;
    }

    write_wav(paths.root / rec.clean, mix.clean);
    write_wav(paths.root / rec.noise, mix.noise);
    write_wav(paths.root / rec.mixed, mix.mixed);

    if (pr.split == "train") {
      // Calibration uses the files as written so later file-based scoring
      // sees exactly the calibrated scale.
      const auto clean_mps = fx.mps(read_wav(paths.root / rec.clean, cfg.sample_rate));
      const auto mixed_mps = fx.mps(read_wav(paths.root / rec.mixed, cfg.sample_rate));
      train_lsd[row] = log_spectral_distance(mixed_mps, clean_mps);
    }
    records[row] = std::move(rec);
  });

  DatasetManifest manifest;
  manifest.sample_rate = cfg.sample_rate;
  manifest.base_dir = paths.root;
  manifest.train_noise_begin = 0;
  manifest.train_noise_end = half;
  manifest.test_noise_begin = half;
  manifest.test_noise_end = noise_pool.samples.size();
  manifest.records = std::move(records);

  std::vector<double> lsds;
  for (const double v : train_lsd) {
    if (v >= 0.0) lsds.push_back(v);
  }
  manifest.lsd_cal = percentile_95(lsds);

  save_manifest(paths.manifest(), manifest);
  save_config(paths.resolved_config("prepare"), cfg);
  return manifest;
}

KmeansResult build_codebook(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                            const ExperimentPaths& paths, bool force) {
  if (std::filesystem::exists(paths.codebook()) && !force) {
    std::cerr << "build-codebook: " << paths.codebook().string()
              << " exists, skipping (use --force)\n";
    KmeansResult res;
    res.codebook = load_codebook(paths.codebook());
    return res;
  }

  const auto train = manifest.split_records("train");
  if (train.empty()) throw DataError("build_codebook: manifest has no train records");

  const FeatureExtractor fx(cfg);
  std::vector<std::vector<IbmVector>> per_record(train.size());
  parallel_for(train.size(), cfg.jobs, [&](size_t i) {
    const auto& r = *train[i];
    const auto clean_mps = fx.mps(read_wav(manifest.resolve(r.clean), cfg.sample_rate));
    const auto noise_mps = fx.mps(read_wav(manifest.resolve(r.noise), cfg.sample_rate));
    per_record[i] = fx.oracle_chunk_masks(clean_mps, noise_mps);
  });

  std::vector<IbmVector> samples;
  for (auto& group : per_record) {
    for (auto& m : group) samples.push_back(std::move(m));
  }

  KmeansResult res = kmeans_binary(samples, cfg.clusters, cfg.seed, cfg.kmeans_max_iter);
  save_codebook(paths.codebook(), res.codebook);
  save_config(paths.resolved_config("build-codebook"), cfg);
  return res;
}

PretrainResult run_pretrain(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                            const ExperimentPaths& paths, bool force) {
  if (std::filesystem::exists(paths.mask_estimator()) && !force) {
    std::cerr << "pretrain: " << paths.mask_estimator().string()
              << " exists, skipping (use --force)\n";
    PretrainResult res;
    res.net = load_network(paths.mask_estimator());
    return res;
  }

  const auto train = manifest.split_records("train");
  if (train.empty()) throw DataError("run_pretrain: manifest has no train records");

  const FeatureExtractor fx(cfg);
  struct PerRecord {
    std::vector<Eigen::VectorXd> contexts;
    std::vector<IbmVector> targets;
  };
  std::vector<PerRecord> per_record(train.size());
  parallel_for(train.size(), cfg.jobs, [&](size_t i) {
    const auto& r = *train[i];
    const auto noisy_mps = fx.mps(read_wav(manifest.resolve(r.mixed), cfg.sample_rate));
    const auto clean_mps = fx.mps(read_wav(manifest.resolve(r.clean), cfg.sample_rate));
    const auto noise_mps = fx.mps(read_wav(manifest.resolve(r.noise), cfg.sample_rate));
    per_record[i].contexts = fx.contexts(fx.chunks(noisy_mps));
    per_record[i].targets = fx.oracle_chunk_masks(clean_mps, noise_mps);
  });

  std::vector<Eigen::VectorXd> inputs, targets;
  for (const auto& pr : per_record) {
    if (pr.contexts.size() != pr.targets.size()) {
      throw DataError("run_pretrain: context/target count mismatch");
    }
    for (size_t c = 0; c < pr.contexts.size(); ++c) {
      inputs.push_back(pr.contexts[c]);
      Eigen::VectorXd bits(static_cast<Eigen::Index>(pr.targets[c].size()));
      for (size_t j = 0; j < pr.targets[c].size(); ++j) {
        bits[static_cast<Eigen::Index>(j)] = pr.targets[c].get(j) ? 1.0 : 0.0;
      }
      targets.push_back(std::move(bits));
    }
  }

  PretrainResult res =
      pretrain_mask_estimator(inputs, targets, cfg.pretrain_hidden, cfg.pretrain_train_config());
  save_network(paths.mask_estimator(), res.net);

  std::ofstream log(paths.pretrain_log(), std::ios::binary | std::ios::trunc);
  log << "epoch,loss\n";
  for (size_t e = 0; e < res.stats.epoch_loss.size(); ++e) {
    log << e << "," << format_number(res.stats.epoch_loss[e]) << "\n";
  }
  save_config(paths.resolved_config("pretrain"), cfg);
  return res;
}

RlTrainResult run_rl_train(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                           const RecognizerEndpoint& endpoint, const ExperimentPaths& paths,
                           bool force) {
  if (std::filesystem::exists(paths.action_model()) && !force) {
    std::cerr << "train-rl: " << paths.action_model().string()
              << " exists, skipping (use --force)\n";
    RlTrainResult res;
    res.net = load_network(paths.action_model());
    return res;
  }

  const auto train = manifest.split_records("train");
  if (train.empty()) throw DataError("run_rl_train: manifest has no train records");

  const Codebook codebook = load_codebook(paths.codebook());
  const Network pretrained = load_network(paths.mask_estimator());
  if (pretrained.input_dim() != cfg.network_input_dim()) {
    throw DataError("run_rl_train: mask estimator input dim " +
                    std::to_string(pretrained.input_dim()) + " != configured " +
                    std::to_string(cfg.network_input_dim()));
  }

  RlTrainResult res;
  res.net = extend_to_action_head(pretrained, cfg.clusters, cfg.action_hidden,
                                  derive_seed(cfg.seed, 0xace0ull, 2));

  const FeatureExtractor fx(cfg);
  const RecognizerEndpoint ep = resolved_endpoint(endpoint, cfg, manifest, paths);
  std::filesystem::create_directories(ep.scratch_dir);
  const auto recognizer = make_recognizer(ep);

  std::vector<RlUtterance> data(train.size());
  parallel_for(train.size(), cfg.jobs, [&](size_t i) {
    const auto& r = *train[i];
    data[i] = make_rl_utterance(r.id, read_wav(manifest.resolve(r.mixed), cfg.sample_rate),
                                read_wav(manifest.resolve(r.clean), cfg.sample_rate),
                                read_wav(manifest.resolve(r.noise), cfg.sample_rate),
                                reference_for(r, manifest, ep.kind), codebook, fx);
  });

  std::ofstream log(paths.rl_log(), std::ios::binary | std::ios::trunc);
  log << "epoch,mean_reward,mean_z_enhanced,z_noisy_baseline,loss,used,failed\n";
  log.flush();

  Rng order_rng(derive_seed(cfg.seed, 0x0bdeull, 3));
  for (int epoch = 0; epoch < cfg.rl_epochs; ++epoch) {
    TrainConfig pass = cfg.rl_train_config();
    pass.seed = derive_seed(cfg.seed, 0xba7c4ull, static_cast<uint64_t>(epoch));
    const RlEpochStats stats =
        rl_epoch(data, res.net, codebook, *recognizer, fx, cfg.alpha, pass, order_rng);
    res.epochs.push_back(stats);
    log << epoch << "," << format_number(stats.mean_reward) << ","
        << format_number(stats.mean_z_enhanced) << "," << format_number(stats.mean_z_noisy) << ","
        << format_number(stats.train_loss) << "," << stats.utterances_used << ","
        << stats.utterances_failed << "\n";
    log.flush();
    std::cerr << "rl epoch " << epoch << ": mean_R=" << stats.mean_reward
              << " mean_z_enh=" << stats.mean_z_enhanced << " z_noisy=" << stats.mean_z_noisy
              << " loss=" << stats.train_loss << "\n";
  }

  save_network(paths.action_model(), res.net);
  save_config(paths.resolved_config("train-rl"), cfg);
  return res;
}

Waveform enhance_waveform(const Waveform& noisy, const Network& action_model,
                          const Codebook& codebook, const FeatureExtractor& fx) {
  const auto contexts = fx.contexts(fx.chunks(fx.mps(noisy)));
  std::vector<const BitVector*> masks;
  masks.reserve(contexts.size());
  for (const auto& ctx : contexts) {
    masks.push_back(&select_mask(codebook, argmax_action(action_model.forward(ctx))));
  }
  return fx.enhance_with_masks(noisy, masks);
}

Waveform enhance_with_oracle_ibm(const Waveform& noisy, const Waveform& clean,
                                 const Waveform& noise, const FeatureExtractor& fx) {
  const auto oracle = fx.oracle_chunk_masks(fx.mps(clean), fx.mps(noise));
  std::vector<const BitVector*> masks;
  masks.reserve(oracle.size());
  for (const auto& m : oracle) masks.push_back(&m);
  return fx.enhance_with_masks(noisy, masks);
}

NearestNeighborIndex build_1nn_index(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                     const Codebook& codebook, const FeatureExtractor& fx) {
  const auto train = manifest.split_records("train");
  if (train.empty()) throw DataError("build_1nn_index: manifest has no train records");

  struct PerRecord {
    std::vector<Eigen::VectorXd> points;
    std::vector<int> labels;
  };
  std::vector<PerRecord> per_record(train.size());
  parallel_for(train.size(), cfg.jobs, [&](size_t i) {
    const auto& r = *train[i];
    const auto noisy_mps = fx.mps(read_wav(manifest.resolve(r.mixed), cfg.sample_rate));
    const auto clean_mps = fx.mps(read_wav(manifest.resolve(r.clean), cfg.sample_rate));
    const auto noise_mps = fx.mps(read_wav(manifest.resolve(r.noise), cfg.sample_rate));
    auto contexts = fx.contexts(fx.chunks(noisy_mps));
    const auto oracle = fx.oracle_chunk_masks(clean_mps, noise_mps);
    for (auto& ctx : contexts) {
      for (Eigen::Index j = 0; j < ctx.size(); ++j) ctx[j] = floored_log(ctx[j]);
      per_record[i].points.push_back(std::move(ctx));
    }
    for (const auto& m : oracle) per_record[i].labels.push_back(nearest_cluster(m, codebook));
  });

  NearestNeighborIndex index;
  for (auto& pr : per_record) {
    for (auto& p : pr.points) index.points.push_back(std::move(p));
    for (const int l : pr.labels) index.labels.push_back(l);
  }
  if (index.points.size() != index.labels.size() || index.points.empty()) {
    throw DataError("build_1nn_index: empty or inconsistent index");
  }
  return index;
}

int query_1nn(const NearestNeighborIndex& index, const Eigen::VectorXd& log_context) {
  if (index.points.empty()) throw DataError("query_1nn: empty index");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < index.points.size(); ++i) {
    const auto& p = index.points[i];
    if (p.size() != log_context.size()) throw DataError("query_1nn: dimension mismatch");
    double d = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double diff = p[j] - log_context[j];
      d += diff * diff;
      if (d >= best_d) break;  // partial-distance early exit
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Waveform enhance_1nn(const Waveform& noisy, const NearestNeighborIndex& index,
                     const Codebook& codebook, const FeatureExtractor& fx) {
  auto contexts = fx.contexts(fx.chunks(fx.mps(noisy)));
  std::vector<const BitVector*> masks;
  masks.reserve(contexts.size());
  for (auto& ctx : contexts) {
    for (Eigen::Index j = 0; j < ctx.size(); ++j) ctx[j] = floored_log(ctx[j]);
    const int neighbor = query_1nn(index, ctx);
    masks.push_back(&select_mask(codebook, index.labels[static_cast<size_t>(neighbor)]));
  }
  return fx.enhance_with_masks(noisy, masks);
}

std::vector<std::filesystem::path> enhance_test_set(const DatasetManifest& manifest,
                                                    const ExperimentConfig& cfg,
                                                    const std::string& system,
                                                    const ExperimentPaths& paths, bool force) {
  const auto test = manifest.split_records("test");
  if (test.empty()) throw DataError("enhance_test_set: manifest has no test records");

  const FeatureExtractor fx(cfg);
  const auto out_dir = paths.enhanced_dir(system);
  std::filesystem::create_directories(out_dir);

  Codebook codebook;
  Network model;
  NearestNeighborIndex index;
  if (system == "rlse") {
    codebook = load_codebook(paths.codebook());
    model = load_network(paths.action_model());
  } else if (system == "1nn") {
    codebook = load_codebook(paths.codebook());
    index = build_1nn_index(manifest, cfg, codebook, fx);
  } else if (system != "oracle") {
    throw DataError("enhance_test_set: unknown system '" + system + "'");
  }

  std::vector<std::filesystem::path> written(test.size());
  parallel_for(test.size(), cfg.jobs, [&](size_t i) {
    const auto& r = *test[i];
    const auto out_path = out_dir / enhanced_file_name(r);
    written[i] = out_path;
    if (std::filesystem::exists(out_path) && !force) return;

    const Waveform noisy = read_wav(manifest.resolve(r.mixed), cfg.sample_rate);
    Waveform enhanced;
    if (system == "rlse") {
      enhanced = enhance_waveform(noisy, model, codebook, fx);
    } else if (system == "1nn") {
      enhanced = enhance_1nn(noisy, index, codebook, fx);
    } else {
      enhanced = enhance_with_oracle_ibm(noisy, read_wav(manifest.resolve(r.clean), cfg.sample_rate),
                                         read_wav(manifest.resolve(r.noise), cfg.sample_rate), fx);
    }
    write_wav(out_path, enhanced);
  });
  save_config(paths.resolved_config("enhance-" + system), cfg);
  return written;
}

EvalResult evaluate(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                    const RecognizerEndpoint& endpoint, const std::vector<std::string>& systems,
                    const ExperimentPaths& paths, bool force) {
  if (std::filesystem::exists(paths.results()) && !force) {
    std::cerr << "evaluate: " << paths.results().string() << " exists, skipping (use --force)\n";
    EvalResult res;
    res.rows = load_results(paths.results());
    return res;
  }

  const auto test = manifest.split_records("test");
  if (test.empty()) throw DataError("evaluate: manifest has no test records");

  const FeatureExtractor fx(cfg);
  const RecognizerEndpoint ep = resolved_endpoint(endpoint, cfg, manifest, paths);
  std::filesystem::create_directories(ep.scratch_dir);
  const auto recognizer = make_recognizer(ep);

  EvalResult res;
  for (const auto* rec : test) {
    const Waveform clean = read_wav(manifest.resolve(rec->clean), cfg.sample_rate);
    const Eigen::MatrixXd clean_mps = fx.mps(clean);
    for (const auto& system : systems) {
      std::filesystem::path wav_path;
      if (system == "noisy") {
        wav_path = manifest.resolve(rec->mixed);
      } else {
        wav_path = paths.enhanced_dir(system) / enhanced_file_name(*rec);
      }
      if (!std::filesystem::exists(wav_path)) {
        res.missing.push_back(system + ": " + wav_path.string());
        continue;
      }
      const Waveform audio = read_wav(wav_path, cfg.sample_rate);

      EvalRow row;
      row.id = rec->id;
      row.snr_db = rec->snr_db;
      row.system = system;
      try {
        row.error_rate = recognizer->score(rec->id + "#" + system, audio,
                                           reference_for(*rec, manifest, ep.kind));
      } catch (const RecognizerError& e) {
        res.missing.push_back(system + ": " + rec->id + ": " + e.what());
        continue;
      }
      row.seg_snr_db = segmental_snr_db(clean, audio, cfg.stft.frame_length);
      row.lsd = log_spectral_distance(clean_mps, fx.mps(audio));
      res.rows.push_back(std::move(row));
    }
  }

  if (res.rows.empty()) {
    std::string detail = res.missing.empty() ? "" : (": " + res.missing.front());
    throw RecognizerError("evaluate: no utterance could be scored" + detail);
  }
  write_results(paths.results(), res.rows);
  save_config(paths.resolved_config("evaluate"), cfg);
  for (const auto& m : res.missing) std::cerr << "evaluate: missing output " << m << "\n";
  return res;
}

Report report(const DatasetManifest& manifest, const ExperimentConfig& cfg,
              const ExperimentPaths& paths) {
  const auto rows = load_results(paths.results());
  if (rows.empty()) throw DataError("report: no evaluation rows in " + paths.results().string());

  struct Key {
    double snr;
    std::string system;
    bool operator<(const Key& o) const {
      if (snr != o.snr) return snr < o.snr;
      if (system_rank(system) != system_rank(o.system)) {
        return system_rank(system) < system_rank(o.system);
      }
      return system < o.system;
    }
  };
  std::map<Key, std::vector<const EvalRow*>> groups;
  for (const auto& r : rows) groups[{r.snr_db, r.system}].push_back(&r);

  Report rep;
  for (const auto& [key, members] : groups) {
    ReportCondition c;
    c.snr_db = key.snr;
    c.system = key.system;
    c.utterances = static_cast<int>(members.size());
    for (const auto* r : members) {
      c.mean_error_rate += r->error_rate;
      c.mean_seg_snr_db += r->seg_snr_db;
      c.mean_lsd += r->lsd;
    }
    c.mean_error_rate /= c.utterances;
    c.mean_seg_snr_db /= c.utterances;
    c.mean_lsd /= c.utterances;
    rep.conditions.push_back(std::move(c));
  }
  for (auto& c : rep.conditions) {
    if (c.system == "noisy") continue;
    for (const auto& base : rep.conditions) {
      if (base.system == "noisy" && base.snr_db == c.snr_db && base.mean_error_rate > 0.0) {
        c.reduction_vs_noisy_percent =
            relative_reduction_percent(base.mean_error_rate, c.mean_error_rate);
      }
    }
  }

  std::ofstream out(paths.report(), std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write report: " + paths.report().string());
  out << "snr_db,system,mean_error_rate,mean_seg_snr_db,mean_lsd,utterances,"
         "reduction_vs_noisy_percent\n";
  for (const auto& c : rep.conditions) {
    out << csv_join({format_snr(c.snr_db), c.system, format_number(c.mean_error_rate),
                     format_number(c.mean_seg_snr_db), format_number(c.mean_lsd),
                     std::to_string(c.utterances),
                     c.reduction_vs_noisy_percent ? format_number(*c.reduction_vs_noisy_percent)
                                                  : std::string()})
        << "\n";
  }

  // Plot data: codebook matrix plus log-mel spectrograms of the first
  // test utterance per SNR for every system that produced output.
  std::filesystem::create_directories(paths.plots_dir());
  if (std::filesystem::exists(paths.codebook())) {
    const Codebook cb = load_codebook(paths.codebook());
    Eigen::MatrixXd m(cb.size(), cb.dim());
    for (int a = 0; a < cb.size(); ++a) {
      for (int j = 0; j < cb.dim(); ++j) {
        m(a, j) = cb.centroids[static_cast<size_t>(a)].get(static_cast<size_t>(j)) ? 1.0 : 0.0;
      }
    }
    write_matrix_csv(paths.plots_dir() / "codebook.csv", m);
  }

  const FeatureExtractor fx(cfg);
  std::map<double, const UtteranceRecord*> first_per_snr;
  for (const auto& r : manifest.records) {
    if (r.split != "test") continue;
    auto it = first_per_snr.find(r.snr_db);
    if (it == first_per_snr.end() || r.id < it->second->id) first_per_snr[r.snr_db] = &r;
  }
  for (const auto& [snr, rec] : first_per_snr) {
    const std::string base = rec->id + "__snr" + format_snr(snr);
    if (!rec->clean.empty() && std::filesystem::exists(manifest.resolve(rec->clean))) {
      write_matrix_csv(paths.plots_dir() / ("spec_" + base + "_clean.csv"),
                       log_mel_of(manifest.resolve(rec->clean), fx));
    }
    if (!rec->mixed.empty() && std::filesystem::exists(manifest.resolve(rec->mixed))) {
      write_matrix_csv(paths.plots_dir() / ("spec_" + base + "_noisy.csv"),
                       log_mel_of(manifest.resolve(rec->mixed), fx));
    }
    for (const std::string system : {"1nn", "rlse", "oracle"}) {
      const auto wav_path = paths.enhanced_dir(system) / enhanced_file_name(*rec);
      if (std::filesystem::exists(wav_path)) {
        write_matrix_csv(paths.plots_dir() / ("spec_" + base + "_" + system + ".csv"),
                         log_mel_of(wav_path, fx));
      }
    }
  }
  return rep;
}

}  // namespace rlse
