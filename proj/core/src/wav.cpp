// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rlse/error.hpp"

namespace rlse {

namespace {

constexpr double kPcmScale = 32767.0;

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

int16_t quantize_sample(double x) {
  if (x > 1.0) x = 1.0;
  if (x < -1.0) x = -1.0;
  const double scaled = x * kPcmScale;
  // Round half away from zero, pinned independent of FP rounding mode.
  const double r = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
  return static_cast<int16_t>(r);
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path.string());

  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw DataError("not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;

  size_t off = 12;
  while (off + 8 <= n) {
    const char* id = bytes.data() + off;
    const uint32_t len = read_u32(p + off + 4);
    const size_t body = off + 8;
    if (body + len > n) throw DataError("truncated WAV chunk in " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw DataError("malformed fmt chunk in " + path.string());
      format = read_u16(p + body);
      channels = read_u16(p + body + 2);
      rate = read_u32(p + body + 4);
      bits = read_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) {
    throw DataError("WAV file missing fmt/data chunk: " + path.string());
  }
  if (format != 1 || bits != 16) {
    throw DataError("unsupported WAV encoding (need 16-bit PCM): " + path.string());
  }
  if (channels != 1) {
    throw DataError("unsupported channel count " + std::to_string(channels) +
                    " (need mono): " + path.string());
  }

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  const size_t count = data_len / 2;
  w.samples.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const auto* sp = p + data_off + 2 * i;
    const int16_t s = static_cast<int16_t>(sp[0] | sp[1] << 8);
    w.samples[i] = static_cast<double>(s) / kPcmScale;
  }
  return w;
}

Waveform read_wav(const std::filesystem::path& path, int expected_rate) {
  Waveform w = read_wav(path);
  if (w.sample_rate != expected_rate) {
    throw DataError("sample rate mismatch in " + path.string() + ": got " +
                    std::to_string(w.sample_rate) + ", expected " +
                    std::to_string(expected_rate));
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw DataError("write_wav: sample_rate must be positive");

  const uint32_t data_len = static_cast<uint32_t>(w.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(w.sample_rate));
  put_u32(out, static_cast<uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.append("data");
  put_u32(out, data_len);
  for (const double x : w.samples) {
    put_u16(out, static_cast<uint16_t>(quantize_sample(x)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write WAV file: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("short write to WAV file: " + path.string());
}

}  // namespace rlse
