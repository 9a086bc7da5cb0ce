// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_MANIFEST_HPP_
#define RLSE_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rlse {

struct UtteranceRecord {
  std::string id;
  std::string split;  // "train" or "test"
  double snr_db = 0.0;
  // Paths relative to the manifest directory.
  std::string clean;
  std::string noise;
  std::string mixed;
  double noise_scale = 1.0;    // amplitude applied to the raw noise segment
  double norm_scale = 1.0;     // joint rescale applied to avoid clipping
  uint64_t noise_offset = 0;   // sample offset into the source noise waveform
  std::string reference;       // optional transcript for external recognizers
};

// Dataset produced by the prepare stage. Train and test rows draw their
// noise from disjoint halves of the source waveform; the ranges are
// recorded so the split stays auditable.
struct DatasetManifest {
  int sample_rate = 16000;
  double lsd_cal = 1.0;  // 95th percentile noisy-vs-clean LSD over train pairs
  uint64_t train_noise_begin = 0, train_noise_end = 0;
  uint64_t test_noise_begin = 0, test_noise_end = 0;
  std::vector<UtteranceRecord> records;

  std::filesystem::path base_dir;  // set on load, not serialized

  std::filesystem::path resolve(const std::string& rel) const { return base_dir / rel; }
  std::vector<const UtteranceRecord*> split_records(const std::string& split) const;
};

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace rlse

#endif  // RLSE_MANIFEST_HPP_
