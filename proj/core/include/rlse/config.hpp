// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_CONFIG_HPP_
#define RLSE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlse/network.hpp"
#include "rlse/stft.hpp"

namespace rlse {

// Declarative experiment configuration. Flat key = value text file with
// # comments; unknown keys are rejected. Defaults follow the reference
// setup: 32/16 ms frames, 64 mel bands, 32 clusters, alpha 10, context
// of 11 chunks for p=1 and 5 for p=2.
struct ExperimentConfig {
  uint64_t seed = 17;

  int p = 2;                 // frames per chunk
  int context_chunks = 0;    // F; 0 = derive from p (11 for p=1, 5 for p=2)
  int clusters = 32;         // codebook size A
  double alpha = 10.0;       // reward tanh scale
  int n_mels = 64;
  int sample_rate = 16000;
  StftConfig stft;
  bool shared_mask = false;  // one 64-dim mask replicated across the p frames

  double snr_train_db = 5.0;
  std::vector<double> snr_test_db = {0.0, 5.0};
  double test_fraction = 0.2;

  std::vector<int> pretrain_hidden = {64};
  int pretrain_epochs = 30;
  double pretrain_learning_rate = 0.05;
  int pretrain_batch_size = 16;

  std::vector<int> action_hidden = {64};
  int rl_epochs = 20;
  double rl_learning_rate = 0.05;
  int rl_batch_size = 16;

  int kmeans_max_iter = 100;
  double recognizer_timeout = 30.0;
  int jobs = 1;

  // Optional declared network input dimension; when set it must equal
  // context_chunks * p * n_mels.
  int input_dim = 0;

  int context() const { return context_chunks; }
  int network_input_dim() const { return context_chunks * p * n_mels; }
  int mask_dim() const { return shared_mask ? n_mels : p * n_mels; }

  TrainConfig pretrain_train_config() const {
    return TrainConfig{pretrain_learning_rate, pretrain_epochs, pretrain_batch_size, seed};
  }
  // One gradient pass per RL epoch; epoch count lives in the loop.
  TrainConfig rl_train_config() const {
    return TrainConfig{rl_learning_rate, 1, rl_batch_size, seed + 1};
  }

  // Fills derived defaults (context_chunks) and checks every invariant.
  void resolve();
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Deterministic serialization of every resolved key.
std::string config_to_text(const ExperimentConfig& cfg);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace rlse

#endif  // RLSE_CONFIG_HPP_
