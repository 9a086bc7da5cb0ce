// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlse/error.hpp"
#include "rlse/mel.hpp"

namespace rlse {

double utterance_reward(const RewardInputs& ri) {
  if (!std::isfinite(ri.z_noisy) || !std::isfinite(ri.z_enhanced)) {
    throw DataError("utterance_reward: non-finite error rate");
  }
  if (ri.z_noisy < 0.0 || ri.z_enhanced < 0.0) {
    throw DataError("utterance_reward: negative error rate");
  }
  if (!(ri.alpha > 0.0)) throw DataError("utterance_reward: alpha must be positive");
  const double r = std::tanh(ri.alpha * (ri.z_noisy - ri.z_enhanced));
  // tanh rounds to exactly +/-1 once |x| exceeds ~19.06; keep the open
  // interval by clamping to the nearest representable value below 1.
  constexpr double kLimit = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(r, -kLimit, kLimit);
}

ChunkErrorProfile chunk_errors(const std::vector<Eigen::VectorXd>& clean_chunks,
                               const std::vector<Eigen::VectorXd>& enhanced_chunks) {
  if (clean_chunks.size() != enhanced_chunks.size() || clean_chunks.empty()) {
    throw DataError("chunk_errors: need equal nonzero chunk counts");
  }

  ChunkErrorProfile profile;
  profile.raw.reserve(clean_chunks.size());
  double max_raw = 0.0;
  for (size_t c = 0; c < clean_chunks.size(); ++c) {
    const auto& s = clean_chunks[c];
    const auto& e = enhanced_chunks[c];
    if (s.size() != e.size()) {
      throw DataError("chunk_errors: dimension mismatch at chunk " + std::to_string(c));
    }
    double sq = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double d = floored_log(s[i]) - floored_log(e[i]);
      sq += d * d;
    }
    profile.raw.push_back(sq);
    max_raw = std::max(max_raw, sq);
  }

  profile.normalized.reserve(profile.raw.size());
  for (const double r : profile.raw) {
    profile.normalized.push_back(max_raw > 0.0 ? r / max_raw : 0.0);
  }
  return profile;
}

double chunk_reward(double e_norm, double utterance_r) {
  if (!(e_norm >= 0.0 && e_norm <= 1.0)) {
    throw DataError("chunk_reward: normalized error " + std::to_string(e_norm) +
                    " outside [0, 1]");
  }
  return utterance_r > 0.0 ? (1.0 - e_norm) * utterance_r : e_norm * utterance_r;
}

Eigen::VectorXd update_action(const Eigen::VectorXd& predicted_scores, int predicted_index,
                              int oracle_index, double chunk_r, double utterance_r) {
  const int n = static_cast<int>(predicted_scores.size());
  if (predicted_index < 0 || predicted_index >= n || oracle_index < 0 || oracle_index >= n) {
    throw DataError("update_action: action index out of range");
  }
  Eigen::VectorXd target = predicted_scores;
  if (utterance_r > 0.0) {
    target[predicted_index] = chunk_r + predicted_scores.maxCoeff();
  } else if (utterance_r < 0.0) {
    target[oracle_index] = predicted_scores[oracle_index] - chunk_r;
  }
  return target;
}

}  // namespace rlse
