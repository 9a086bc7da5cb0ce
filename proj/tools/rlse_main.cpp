// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlse/config.hpp"
#include "rlse/error.hpp"
#include "rlse/features.hpp"
#include "rlse/mel.hpp"
#include "rlse/pipeline.hpp"
#include "rlse/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rlse;

struct CommonOptions {
  std::string exp_dir = "exp";
  std::string config_file;
  std::string recognizer_cmd;
  int64_t seed = -1;
  int jobs = 0;
  bool force = false;
};

ExperimentConfig resolve_config(const CommonOptions& common) {
  ExperimentConfig cfg;
  fs::path source = common.config_file;
  if (source.empty()) {
    const fs::path prepared = fs::path(common.exp_dir) / "config.prepare.resolved";
    if (fs::exists(prepared)) source = prepared;
  }
  if (!source.empty()) {
    cfg = load_config(source);
  } else {
    cfg.resolve();
  }
  if (common.seed >= 0) cfg.seed = static_cast<uint64_t>(common.seed);
  if (common.jobs > 0) cfg.jobs = common.jobs;
  cfg.resolve();
  return cfg;
}

RecognizerEndpoint resolve_endpoint(const CommonOptions& common, const ExperimentConfig& cfg) {
  RecognizerEndpoint ep;
  std::string cmd = common.recognizer_cmd;
  if (cmd.empty()) {
    if (const char* env = std::getenv("RLSE_RECOGNIZER_CMD")) cmd = env;
  }
  if (!cmd.empty()) {
    ep.kind = RecognizerEndpoint::Kind::kExternal;
    ep.command = cmd;
  }
  ep.timeout_seconds = cfg.recognizer_timeout;
  return ep;
}

void print_report(const Report& rep) {
  std::printf("%8s  %-8s  %12s  %12s  %10s  %6s  %12s\n", "snr_db", "system", "error_rate",
              "seg_snr_db", "lsd", "utts", "red_vs_noisy");
  for (const auto& c : rep.conditions) {
    std::printf("%8g  %-8s  %12.4f  %12.2f  %10.3f  %6d  ", c.snr_db, c.system.c_str(),
                c.mean_error_rate, c.mean_seg_snr_db, c.mean_lsd, c.utterances);
    if (c.reduction_vs_noisy_percent) {
      std::printf("%11.2f%%\n", *c.reduction_vs_noisy_percent);
    } else {
      std::printf("%12s\n", "-");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary-mask speech enhancement trained against a black-box recognizer"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonOptions common;
  app.add_option("--exp", common.exp_dir, "Experiment directory")->capture_default_str();
  app.add_option("--config", common.config_file,
                 "Config file (default: <exp>/config.prepare.resolved when present)");
  app.add_option("--seed", common.seed, "Override the config seed");
  app.add_option("--jobs", common.jobs, "Worker threads for per-utterance stages");
  app.add_option("--recognizer-cmd", common.recognizer_cmd,
                 "External recognizer command (default: $RLSE_RECOGNIZER_CMD, else mock)");
  app.add_flag("--force", common.force, "Recompute outputs that already exist");

  // prepare
  std::string clean_dir, noise_file, transcripts_file;
  auto* cmd_prepare = app.add_subcommand("prepare", "Mix the dataset and write the manifest");
  cmd_prepare->add_option("--clean", clean_dir, "Directory of clean 16 kHz mono WAVs")->required();
  cmd_prepare->add_option("--noise", noise_file, "Noise source WAV")->required();
  cmd_prepare->add_option("--transcripts", transcripts_file,
                          "CSV of id,reference text (needed for external recognizers)");

  // build-codebook
  auto* cmd_codebook = app.add_subcommand("build-codebook", "Cluster training masks");

  // pretrain
  auto* cmd_pretrain = app.add_subcommand("pretrain", "Train the mask estimator");

  // train-rl
  auto* cmd_rl = app.add_subcommand("train-rl", "Run the recognizer-in-the-loop training");

  // enhance
  std::string in_wav, out_wav, oracle_clean, oracle_noise;
  bool enhance_all = false, enhance_oracle = false;
  auto* cmd_enhance = app.add_subcommand("enhance", "Enhance audio with the trained model");
  cmd_enhance->add_option("--in", in_wav, "Input WAV");
  cmd_enhance->add_option("--out", out_wav, "Output WAV");
  cmd_enhance->add_flag("--all", enhance_all, "Enhance every test utterance in the manifest");
  cmd_enhance->add_flag("--oracle", enhance_oracle,
                        "Oracle-mask bypass (needs --clean/--noise for single files)");
  cmd_enhance->add_option("--clean", oracle_clean, "Clean reference for --oracle single-file");
  cmd_enhance->add_option("--noise", oracle_noise, "Noise reference for --oracle single-file");

  // baseline-1nn
  std::string nn_in, nn_out;
  bool nn_all = false;
  auto* cmd_1nn = app.add_subcommand("baseline-1nn", "Nearest-neighbor mask selection baseline");
  cmd_1nn->add_option("--in", nn_in, "Input WAV");
  cmd_1nn->add_option("--out", nn_out, "Output WAV");
  cmd_1nn->add_flag("--all", nn_all, "Process every test utterance in the manifest");

  // evaluate
  std::vector<std::string> systems;
  auto* cmd_eval = app.add_subcommand("evaluate", "Score enhanced outputs");
  cmd_eval->add_option("--systems", systems,
                       "Systems to score (default: noisy plus present enhanced dirs)");

  // report
  auto* cmd_report = app.add_subcommand("report", "Aggregate results and export plot data");

  // synth-demo
  std::string synth_out = "demo-data";
  int synth_utts = 24;
  double synth_seconds = 1.2;
  auto* cmd_synth = app.add_subcommand("synth-demo", "Generate a synthetic demo dataset");
  cmd_synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
  cmd_synth->add_option("--utterances", synth_utts, "Clean utterance count")
      ->capture_default_str();
  cmd_synth->add_option("--seconds", synth_seconds, "Seconds per utterance")
      ->capture_default_str();

  // dump-features
  std::string dump_in, dump_out;
  auto* cmd_dump = app.add_subcommand("dump-features", "Export the log-mel matrix of a WAV as CSV");
  cmd_dump->add_option("in", dump_in, "Input WAV")->required();
  cmd_dump->add_option("out", dump_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    const ExperimentConfig cfg = resolve_config(common);
    ExperimentPaths paths{fs::path(common.exp_dir)};

    if (cmd_prepare->parsed()) {
      fs::create_directories(paths.root);
      std::map<std::string, std::string> transcripts;
      if (!transcripts_file.empty()) transcripts = load_transcripts(transcripts_file);
      prepare(cfg, clean_dir, noise_file, paths, common.force, transcripts);
      std::cerr << "prepare: wrote " << paths.manifest().string() << "\n";
      return 0;
    }

    if (cmd_synth->parsed()) {
      write_demo_dataset(synth_out, synth_utts, synth_seconds, cfg.seed, cfg.sample_rate);
      std::cerr << "synth-demo: wrote " << synth_utts << " utterances under " << synth_out
                << "\n";
      return 0;
    }

    if (cmd_dump->parsed()) {
      const FeatureExtractor fx(cfg);
      Eigen::MatrixXd m = fx.mps(read_wav(dump_in, cfg.sample_rate));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = floored_log(m(r, c));
      }
      std::ofstream out(dump_out, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write " + dump_out);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (c) out << ',';
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.10g", m(r, c));
          out << buf;
        }
        out << '\n';
      }
      return 0;
    }

    const DatasetManifest manifest = load_manifest(paths.manifest());

    if (cmd_codebook->parsed()) {
      const KmeansResult res = build_codebook(manifest, cfg, paths, common.force);
      std::cerr << "build-codebook: " << res.codebook.size() << " centroids of dim "
                << res.codebook.dim() << ", " << res.codebook.iterations << " iterations\n";
      return 0;
    }

    if (cmd_pretrain->parsed()) {
      const PretrainResult res = run_pretrain(manifest, cfg, paths, common.force);
      if (!res.stats.epoch_loss.empty()) {
        std::cerr << "pretrain: final loss " << res.stats.final_loss() << "\n";
      }
      return 0;
    }

    if (cmd_rl->parsed()) {
      const RecognizerEndpoint ep = resolve_endpoint(common, cfg);
      run_rl_train(manifest, cfg, ep, paths, common.force);
      return 0;
    }

    if (cmd_enhance->parsed()) {
      if (enhance_all) {
        enhance_test_set(manifest, cfg, enhance_oracle ? "oracle" : "rlse", paths, common.force);
        return 0;
      }
      if (in_wav.empty() || out_wav.empty()) {
        throw CLI::ValidationError("enhance", "need --in and --out, or --all");
      }
      const FeatureExtractor fx(cfg);
      const Waveform noisy = read_wav(in_wav, cfg.sample_rate);
      Waveform out;
      if (enhance_oracle) {
        if (oracle_clean.empty() || oracle_noise.empty()) {
          throw CLI::ValidationError("enhance", "--oracle needs --clean and --noise");
        }
        out = enhance_with_oracle_ibm(noisy, read_wav(oracle_clean, cfg.sample_rate),
                                      read_wav(oracle_noise, cfg.sample_rate), fx);
      } else {
        out = enhance_waveform(noisy, load_network(paths.action_model()),
                               load_codebook(paths.codebook()), fx);
      }
      write_wav(out_wav, out);
      return 0;
    }

    if (cmd_1nn->parsed()) {
      if (nn_all) {
        enhance_test_set(manifest, cfg, "1nn", paths, common.force);
        return 0;
      }
      if (nn_in.empty() || nn_out.empty()) {
        throw CLI::ValidationError("baseline-1nn", "need --in and --out, or --all");
      }
      const FeatureExtractor fx(cfg);
      const Codebook cb = load_codebook(paths.codebook());
      const NearestNeighborIndex index = build_1nn_index(manifest, cfg, cb, fx);
      write_wav(nn_out, enhance_1nn(read_wav(nn_in, cfg.sample_rate), index, cb, fx));
      return 0;
    }

    if (cmd_eval->parsed()) {
      if (systems.empty()) {
        systems.push_back("noisy");
        for (const std::string s : {"1nn", "rlse", "oracle"}) {
          if (fs::is_directory(paths.enhanced_dir(s))) systems.push_back(s);
        }
      }
      const RecognizerEndpoint ep = resolve_endpoint(common, cfg);
      const EvalResult res = evaluate(manifest, cfg, ep, systems, paths, common.force);
      std::cerr << "evaluate: " << res.rows.size() << " rows, " << res.missing.size()
                << " missing outputs\n";
      return 0;
    }

    if (cmd_report->parsed()) {
      print_report(report(manifest, cfg, paths));
      return 0;
    }

    throw Error("no subcommand dispatched");
  } catch (const CLI::Error& e) {
    app.exit(e);
    return 1;
  } catch (const RecognizerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
