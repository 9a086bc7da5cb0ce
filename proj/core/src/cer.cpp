// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/cer.hpp"

#include <algorithm>

#include "rlse/error.hpp"

namespace rlse {

namespace {

bool is_ascii_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

}  // namespace

std::vector<char32_t> scoring_tokens(const std::string& utf8) {
  std::vector<char32_t> out;
  out.reserve(utf8.size());
  size_t i = 0;
  while (i < utf8.size()) {
    const unsigned char b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0;
    size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      len = 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      len = 3;
    } else if ((b0 & 0xf8) == 0xf0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw DataError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > utf8.size()) throw DataError("truncated UTF-8 sequence");
    for (size_t j = 1; j < len; ++j) {
      const unsigned char b = static_cast<unsigned char>(utf8[i + j]);
      if ((b & 0xc0) != 0x80) throw DataError("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (b & 0x3f);
    }
    // Reject overlong encodings and surrogate range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xd800 && cp <= 0xdfff) || cp > 0x10ffff) {
      throw DataError("invalid UTF-8 scalar value");
    }
    if (!is_ascii_space(cp)) out.push_back(cp);
    i += len;
  }
  return out;
}

size_t edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
  // Two-row Wagner-Fischer.
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double cer(const Transcript& hypothesis, const Transcript& reference) {
  const auto ref = scoring_tokens(reference.text);
  if (ref.empty()) throw DataError("cer: empty reference transcript");
  const auto hyp = scoring_tokens(hypothesis.text);
  return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

}  // namespace rlse
