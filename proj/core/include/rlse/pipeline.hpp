// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_PIPELINE_HPP_
#define RLSE_PIPELINE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlse/codebook.hpp"
#include "rlse/config.hpp"
#include "rlse/features.hpp"
#include "rlse/manifest.hpp"
#include "rlse/network.hpp"
#include "rlse/recognizer.hpp"
#include "rlse/rl_loop.hpp"

namespace rlse {

// Well-known file names inside an experiment directory.
struct ExperimentPaths {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.csv"; }
  std::filesystem::path codebook() const { return root / "codebook.rlsecb"; }
  std::filesystem::path mask_estimator() const { return root / "mask_estimator.rlsenet"; }
  std::filesystem::path action_model() const { return root / "action_model.rlsenet"; }
  std::filesystem::path pretrain_log() const { return root / "pretrain_log.csv"; }
  std::filesystem::path rl_log() const { return root / "rl_log.csv"; }
  std::filesystem::path results() const { return root / "results.csv"; }
  std::filesystem::path report() const { return root / "report.csv"; }
  std::filesystem::path enhanced_dir(const std::string& system) const {
    return root / "enhanced" / system;
  }
  std::filesystem::path plots_dir() const { return root / "plots"; }
  std::filesystem::path scratch_dir() const { return root / "scratch"; }
  std::filesystem::path resolved_config(const std::string& stage) const {
    return root / ("config." + stage + ".resolved");
  }
};

struct MixResult {
  Waveform mixed;
  Waveform clean;   // possibly jointly rescaled to avoid clipping
  Waveform noise;   // the exact additive component of `mixed`
  double noise_scale = 1.0;
  double norm_scale = 1.0;
  uint64_t noise_offset = 0;
};

// Scales a seeded noise segment so the clean/noise power ratio hits
// snr_db, then adds. If the sum would clip 16-bit PCM, clean and noise
// are jointly rescaled and the factor recorded.
MixResult mix_at_snr(const Waveform& clean, const Waveform& noise_pool, double snr_db,
                     uint64_t seed);

// Builds the dataset: splits the noise waveform into disjoint train and
// test halves, mixes every utterance at the configured SNRs, computes
// the mock-recognizer LSD calibration (95th percentile of noisy-vs-clean
// over train pairs) and persists the manifest. `transcripts` optionally
// maps utterance ids to reference text for external recognizers.
DatasetManifest prepare(const ExperimentConfig& cfg, const std::filesystem::path& clean_dir,
                        const std::filesystem::path& noise_file, const ExperimentPaths& paths,
                        bool force, const std::map<std::string, std::string>& transcripts = {});

// CSV with columns id, reference.
std::map<std::string, std::string> load_transcripts(const std::filesystem::path& path);

KmeansResult build_codebook(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                            const ExperimentPaths& paths, bool force);

PretrainResult run_pretrain(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                            const ExperimentPaths& paths, bool force);

struct RlTrainResult {
  Network net;
  std::vector<RlEpochStats> epochs;
};

RlTrainResult run_rl_train(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                           const RecognizerEndpoint& endpoint, const ExperimentPaths& paths,
                           bool force);

// Action-model enhancement of one waveform.
Waveform enhance_waveform(const Waveform& noisy, const Network& action_model,
                          const Codebook& codebook, const FeatureExtractor& fx);

// Oracle-IBM enhancement (upper bound): masks computed from the true
// clean and noise signals, no model involved.
Waveform enhance_with_oracle_ibm(const Waveform& noisy, const Waveform& clean,
                                 const Waveform& noise, const FeatureExtractor& fx);

// One-nearest-neighbor baseline: each test chunk takes the codebook
// mask of the closest training chunk in log-MPS context space.
struct NearestNeighborIndex {
  std::vector<Eigen::VectorXd> points;  // log-domain context vectors
  std::vector<int> labels;              // codebook cluster of the chunk's true IBM
};

NearestNeighborIndex build_1nn_index(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                     const Codebook& codebook, const FeatureExtractor& fx);

// Linear scan, ties to the lowest stored index.
int query_1nn(const NearestNeighborIndex& index, const Eigen::VectorXd& log_context);

Waveform enhance_1nn(const Waveform& noisy, const NearestNeighborIndex& index,
                     const Codebook& codebook, const FeatureExtractor& fx);

// Writes enhanced WAVs for every test utterance under
// enhanced/<system>/<id>__snr<d>.wav. `system` is "rlse", "1nn" or
// "oracle". Returns the written paths in manifest order.
std::vector<std::filesystem::path> enhance_test_set(const DatasetManifest& manifest,
                                                    const ExperimentConfig& cfg,
                                                    const std::string& system,
                                                    const ExperimentPaths& paths, bool force);

std::string enhanced_file_name(const UtteranceRecord& r);

struct EvalRow {
  std::string id;
  double snr_db = 0.0;
  std::string system;
  double error_rate = 0.0;
  double seg_snr_db = 0.0;
  double lsd = 0.0;
};

struct EvalResult {
  std::vector<EvalRow> rows;
  std::vector<std::string> missing;  // systems/files skipped
};

// Scores every test utterance for each requested system ("noisy" plus
// any system with enhanced outputs present). Missing outputs are listed
// and skipped, not fatal.
EvalResult evaluate(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                    const RecognizerEndpoint& endpoint, const std::vector<std::string>& systems,
                    const ExperimentPaths& paths, bool force);

struct ReportCondition {
  double snr_db = 0.0;
  std::string system;
  double mean_error_rate = 0.0;
  double mean_seg_snr_db = 0.0;
  double mean_lsd = 0.0;
  int utterances = 0;
  std::optional<double> reduction_vs_noisy_percent;
};

struct Report {
  std::vector<ReportCondition> conditions;
};

// Aggregates results.csv into per-condition means and relative
// reductions, writes report.csv and the plot-data exports (codebook
// matrix, per-utterance metric series, selected spectrograms).
Report report(const DatasetManifest& manifest, const ExperimentConfig& cfg,
              const ExperimentPaths& paths);

}  // namespace rlse

#endif  // RLSE_PIPELINE_HPP_
