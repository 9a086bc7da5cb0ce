// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rlse/error.hpp"
#include "rlse/mel.hpp"

namespace rlse {

double segmental_snr_db(const Waveform& reference, const Waveform& degraded, int frame_length) {
  if (frame_length < 1) throw DataError("segmental_snr_db: bad frame length");
  const size_t n = std::min(reference.samples.size(), degraded.samples.size());
  if (n < static_cast<size_t>(frame_length)) {
    throw DataError("segmental_snr_db: signals shorter than one frame");
  }

  double total = 0.0;
  size_t frames = 0;
  for (size_t start = 0; start + static_cast<size_t>(frame_length) <= n;
       start += static_cast<size_t>(frame_length)) {
    double sig = 0.0, err = 0.0;
    for (size_t i = start; i < start + static_cast<size_t>(frame_length); ++i) {
      const double s = reference.samples[i];
      const double d = s - degraded.samples[i];
      sig += s * s;
      err += d * d;
    }
    if (sig < 1e-12) continue;  // silence frame, excluded by convention
    double snr = 10.0 * std::log10(sig / std::max(err, 1e-12));
    snr = std::clamp(snr, -10.0, 35.0);
    total += snr;
    ++frames;
  }
  if (frames == 0) throw DataError("segmental_snr_db: reference is silent");
  return total / static_cast<double>(frames);
}

double log_spectral_distance(const Eigen::MatrixXd& mps_a, const Eigen::MatrixXd& mps_b) {
  if (mps_a.rows() != mps_b.rows() || mps_a.cols() != mps_b.cols()) {
    throw DataError("log_spectral_distance: shape mismatch");
  }
  if (mps_a.rows() == 0) throw DataError("log_spectral_distance: empty spectrograms");

  double total = 0.0;
  for (Eigen::Index t = 0; t < mps_a.rows(); ++t) {
    double sq = 0.0;
    for (Eigen::Index m = 0; m < mps_a.cols(); ++m) {
      const double d = floored_log(mps_a(t, m)) - floored_log(mps_b(t, m));
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(mps_a.rows());
}

double relative_reduction_percent(double baseline, double system) {
  if (baseline == 0.0) throw DataError("relative_reduction_percent: zero baseline");
  return (baseline - system) / baseline * 100.0;
}

}  // namespace rlse
