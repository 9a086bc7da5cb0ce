// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_RL_LOOP_HPP_
#define RLSE_RL_LOOP_HPP_

#include <string>
#include <vector>

#include "rlse/features.hpp"
#include "rlse/network.hpp"
#include "rlse/recognizer.hpp"
#include "rlse/reward.hpp"
#include "rlse/rng.hpp"

namespace rlse {

// Per-utterance state carried across epochs. Features are extracted
// once; the unenhanced error rate is scored once and cached.
struct RlUtterance {
  std::string id;
  Waveform noisy;
  Reference ref;
  Eigen::MatrixXd clean_mps;
  ChunkSequence noisy_chunks;
  std::vector<Eigen::VectorXd> clean_chunk_vectors;  // aligned with noisy_chunks
  std::vector<Eigen::VectorXd> contexts;
  std::vector<int> oracle_actions;  // nearest codebook cluster of the true IBM per chunk
  double z_noisy = -1.0;            // < 0 until scored
};

RlUtterance make_rl_utterance(std::string id, Waveform noisy, const Waveform& clean,
                              const Waveform& noise, Reference ref, const Codebook& codebook,
                              const FeatureExtractor& fx);

struct RlEpochStats {
  double mean_reward = 0.0;
  double mean_z_enhanced = 0.0;
  double mean_z_noisy = 0.0;
  double train_loss = 0.0;
  int utterances_used = 0;
  int utterances_failed = 0;
};

// One pass of the training loop: predict actions per chunk, enhance,
// score both versions, convert the error-rate difference into utterance
// and chunk rewards, build the action targets and run a single
// gradient pass over all collected (context, target) pairs.
//
// Utterances whose recognizer call fails are skipped and counted;
// the epoch aborts when more than half fail. Order is shuffled with
// `order_rng` so repeated epochs see different batching.
RlEpochStats rl_epoch(std::vector<RlUtterance>& data, Network& net, const Codebook& codebook,
                      Recognizer& recognizer, const FeatureExtractor& fx, double alpha,
                      const TrainConfig& pass_config, Rng& order_rng);

}  // namespace rlse

#endif  // RLSE_RL_LOOP_HPP_
