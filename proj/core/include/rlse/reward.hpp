// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_REWARD_HPP_
#define RLSE_REWARD_HPP_

#include <Eigen/Dense>
#include <vector>

namespace rlse {

struct RewardInputs {
  double z_noisy = 0.0;     // error rate of the unenhanced utterance
  double z_enhanced = 0.0;  // error rate of the enhanced utterance
  double alpha = 10.0;      // positive tanh scale
};

// R = tanh(alpha * (z_noisy - z_enhanced)), always in (-1, 1). Positive
// when enhancement lowered the error rate.
double utterance_reward(const RewardInputs& ri);

struct ChunkErrorProfile {
  std::vector<double> raw;         // squared log-spectral error per chunk
  std::vector<double> normalized;  // raw / max(raw), all zero when max is 0
};

ChunkErrorProfile chunk_errors(const std::vector<Eigen::VectorXd>& clean_chunks,
                               const std::vector<Eigen::VectorXd>& enhanced_chunks);

// r_c = (1 - E_norm) * R for positive R, E_norm * R otherwise. Shares
// the sign of R with magnitude at most |R|.
double chunk_reward(double e_norm, double utterance_r);

// Builds the training target from the predicted action vector: for
// positive R the predicted index is raised to r_c + max(scores); for
// negative R the oracle index is raised by -r_c; for R = 0 the vector
// is returned unchanged. All other entries are copied.
Eigen::VectorXd update_action(const Eigen::VectorXd& predicted_scores, int predicted_index,
                              int oracle_index, double chunk_r, double utterance_r);

}  // namespace rlse

#endif  // RLSE_REWARD_HPP_
