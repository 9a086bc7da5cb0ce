// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_METRICS_HPP_
#define RLSE_METRICS_HPP_

#include <Eigen/Dense>

#include "rlse/wav.hpp"

namespace rlse {

// Mean of per-frame SNRs over non-overlapping 32 ms frames, each frame
// clamped to [-10, 35] dB. Frames where the reference carries no energy
// are skipped. Waveforms are compared over their common prefix.
double segmental_snr_db(const Waveform& reference, const Waveform& degraded,
                        int frame_length = 512);

// Mean over frames of the L2 distance between floored-log mel power
// rows. Drives the mock recognizer and the objective report.
double log_spectral_distance(const Eigen::MatrixXd& mps_a, const Eigen::MatrixXd& mps_b);

// (baseline - system) / baseline in percent.
double relative_reduction_percent(double baseline, double system);

}  // namespace rlse

#endif  // RLSE_METRICS_HPP_
