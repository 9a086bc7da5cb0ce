// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_CSV_HPP_
#define RLSE_CSV_HPP_

#include <string>
#include <vector>

namespace rlse {

// Minimal RFC-4180-style CSV: quoted fields with "" escapes, no
// multi-line fields. Enough for manifests and reports.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);
std::string csv_join(const std::vector<std::string>& fields);

}  // namespace rlse

#endif  // RLSE_CSV_HPP_
