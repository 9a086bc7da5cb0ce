// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/rl_loop.hpp"

#include <iostream>

#include "rlse/error.hpp"

namespace rlse {

RlUtterance make_rl_utterance(std::string id, Waveform noisy, const Waveform& clean,
                              const Waveform& noise, Reference ref, const Codebook& codebook,
                              const FeatureExtractor& fx) {
  RlUtterance u;
  u.id = std::move(id);
  u.ref = std::move(ref);

  const Eigen::MatrixXd noisy_mps = fx.mps(noisy);
  u.clean_mps = fx.mps(clean);
  const Eigen::MatrixXd noise_mps = fx.mps(noise);
  u.noisy = std::move(noisy);

  u.noisy_chunks = fx.chunks(noisy_mps);
  const ChunkSequence clean_chunks = fx.chunks(u.clean_mps);
  if (clean_chunks.count() != u.noisy_chunks.count()) {
    throw DataError("rl utterance " + u.id + ": clean/noisy chunk counts differ");
  }
  u.clean_chunk_vectors = clean_chunks.chunks;
  u.contexts = fx.contexts(u.noisy_chunks);

  const auto oracle_masks = fx.oracle_chunk_masks(u.clean_mps, noise_mps);
  if (static_cast<int>(oracle_masks.size()) != u.noisy_chunks.count()) {
    throw DataError("rl utterance " + u.id + ": oracle mask count mismatch");
  }
  u.oracle_actions.reserve(oracle_masks.size());
  for (const auto& m : oracle_masks) u.oracle_actions.push_back(nearest_cluster(m, codebook));
  return u;
}

RlEpochStats rl_epoch(std::vector<RlUtterance>& data, Network& net, const Codebook& codebook,
                      Recognizer& recognizer, const FeatureExtractor& fx, double alpha,
                      const TrainConfig& pass_config, Rng& order_rng) {
  if (data.empty()) throw DataError("rl_epoch: empty dataset");

  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  order_rng.shuffle(order);

  RlEpochStats stats;
  std::vector<Eigen::VectorXd> pass_inputs, pass_targets;

  for (const size_t idx : order) {
    RlUtterance& u = data[idx];
    try {
      // Predict one action per chunk and pick the codebook masks.
      const int chunk_count = u.noisy_chunks.count();
      std::vector<Eigen::VectorXd> scores;
      std::vector<int> predicted;
      std::vector<const BitVector*> masks;
      scores.reserve(static_cast<size_t>(chunk_count));
      for (int c = 0; c < chunk_count; ++c) {
        scores.push_back(net.forward(u.contexts[static_cast<size_t>(c)]));
        predicted.push_back(argmax_action(scores.back()));
        masks.push_back(&select_mask(codebook, predicted.back()));
      }

      const Waveform enhanced = fx.enhance_with_masks(u.noisy, masks);

      if (u.z_noisy < 0.0) {
        u.z_noisy = recognizer.score(u.id + "#noisy", u.noisy, u.ref);
      }
      const double z_enhanced = recognizer.score(u.id + "#enhanced", enhanced, u.ref);
      const double reward = utterance_reward({u.z_noisy, z_enhanced, alpha});

      // Mel-domain enhanced chunks drive the per-chunk error weighting.
      std::vector<Eigen::VectorXd> enhanced_chunks;
      enhanced_chunks.reserve(static_cast<size_t>(chunk_count));
      for (int c = 0; c < chunk_count; ++c) {
        enhanced_chunks.push_back(
            fx.apply_chunk_mask(u.noisy_chunks.chunks[static_cast<size_t>(c)], *masks[static_cast<size_t>(c)]));
      }
      const ChunkErrorProfile profile = chunk_errors(u.clean_chunk_vectors, enhanced_chunks);

      for (int c = 0; c < chunk_count; ++c) {
        const double r_c = chunk_reward(profile.normalized[static_cast<size_t>(c)], reward);
        pass_inputs.push_back(u.contexts[static_cast<size_t>(c)]);
        pass_targets.push_back(update_action(scores[static_cast<size_t>(c)],
                                             predicted[static_cast<size_t>(c)],
                                             u.oracle_actions[static_cast<size_t>(c)], r_c,
                                             reward));
      }

      stats.mean_reward += reward;
      stats.mean_z_enhanced += z_enhanced;
      stats.mean_z_noisy += u.z_noisy;
      ++stats.utterances_used;
    } catch (const RecognizerError& e) {
      ++stats.utterances_failed;
      std::cerr << "rl_epoch: skipping utterance " << u.id << ": " << e.what() << "\n";
    }
  }

  const int total = stats.utterances_used + stats.utterances_failed;
  if (2 * stats.utterances_failed > total) {
    throw RecognizerError("rl_epoch: " + std::to_string(stats.utterances_failed) + " of " +
                          std::to_string(total) + " utterances failed");
  }
  if (stats.utterances_used == 0) throw RecognizerError("rl_epoch: no usable utterances");

  stats.mean_reward /= stats.utterances_used;
  stats.mean_z_enhanced /= stats.utterances_used;
  stats.mean_z_noisy /= stats.utterances_used;

  const TrainStats pass = train(net, pass_inputs, pass_targets, pass_config);
  stats.train_loss = pass.final_loss();
  return stats;
}

}  // namespace rlse
