// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "rlse/csv.hpp"
#include "rlse/error.hpp"

namespace rlse {

namespace {

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hexf(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw DataError(std::string("manifest: bad number in ") + what);
  return v;
}

}  // namespace

std::vector<const UtteranceRecord*> DatasetManifest::split_records(const std::string& split) const {
  std::vector<const UtteranceRecord*> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(&r);
  }
  return out;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << "# rlse dataset manifest v1\n";
  out << "# sample_rate=" << m.sample_rate << "\n";
  out << "# lsd_cal=" << hexf(m.lsd_cal) << "\n";
  out << "# train_noise=" << m.train_noise_begin << ":" << m.train_noise_end << "\n";
  out << "# test_noise=" << m.test_noise_begin << ":" << m.test_noise_end << "\n";
  out << "id,split,snr_db,clean,noise,mixed,noise_scale,norm_scale,noise_offset,reference\n";
  for (const auto& r : m.records) {
    out << csv_join({r.id, r.split, hexf(r.snr_db), r.clean, r.noise, r.mixed,
                     hexf(r.noise_scale), hexf(r.norm_scale), std::to_string(r.noise_offset),
                     r.reference})
        << "\n";
  }
  if (!out) throw DataError("short write to manifest: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());

  DatasetManifest m;
  m.base_dir = path.parent_path();

  std::string line;
  bool header_row_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "sample_rate") {
        m.sample_rate = std::stoi(value);
      } else if (key == "lsd_cal") {
        m.lsd_cal = parse_hexf(value, "lsd_cal");
      } else if (key == "train_noise" || key == "test_noise") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw DataError("manifest: bad noise range " + value);
        const uint64_t b = std::stoull(value.substr(0, colon));
        const uint64_t e = std::stoull(value.substr(colon + 1));
        if (key == "train_noise") {
          m.train_noise_begin = b;
          m.train_noise_end = e;
        } else {
          m.test_noise_begin = b;
          m.test_noise_end = e;
        }
      }
      continue;
    }
    if (!header_row_seen) {
      header_row_seen = true;
      continue;  // column header
    }
    const auto f = csv_split(line);
    if (f.size() != 10) throw DataError("manifest row needs 10 columns: " + line);
    UtteranceRecord r;
    r.id = f[0];
    r.split = f[1];
    r.snr_db = parse_hexf(f[2], "snr_db");
    r.clean = f[3];
    r.noise = f[4];
    r.mixed = f[5];
    r.noise_scale = parse_hexf(f[6], "noise_scale");
    r.norm_scale = parse_hexf(f[7], "norm_scale");
    r.noise_offset = std::stoull(f[8]);
    r.reference = f[9];
    if (r.split != "train" && r.split != "test") {
      throw DataError("manifest: unknown split '" + r.split + "' for " + r.id);
    }
    m.records.push_back(std::move(r));
  }
  if (m.records.empty()) throw DataError("manifest has no records: " + path.string());
  return m;
}

}  // namespace rlse
