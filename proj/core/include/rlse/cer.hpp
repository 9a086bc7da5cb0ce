// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_CER_HPP_
#define RLSE_CER_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace rlse {

// Recognition output. Stored as UTF-8; scoring operates on unicode
// scalar values with ASCII whitespace removed.
struct Transcript {
  std::string text;
};

// UTF-8 decode to code points, dropping ASCII whitespace. Invalid bytes
// are rejected.
std::vector<char32_t> scoring_tokens(const std::string& utf8);

// (substitutions + deletions + insertions) / reference length via
// unit-cost minimum edit distance. Rejects empty references. Insertions
// can push the rate above 1.
double cer(const Transcript& hypothesis, const Transcript& reference);

// Raw unit-cost edit distance over scoring tokens, exposed for tests
// and diagnostics.
size_t edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b);

}  // namespace rlse

#endif  // RLSE_CER_HPP_
