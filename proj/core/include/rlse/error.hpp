// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_ERROR_HPP_
#define RLSE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rlse {

// Base for all library errors. Subclasses map onto CLI exit codes:
// DataError -> 2, RecognizerError -> 3, anything else -> 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent input data: bad WAV files, dimension
// mismatches, out-of-range parameters, malformed manifests.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// External or mock recognizer failure: timeouts, malformed protocol
// responses, dead child processes.
class RecognizerError : public Error {
 public:
  explicit RecognizerError(const std::string& msg) : Error(msg) {}
};

}  // namespace rlse

#endif  // RLSE_ERROR_HPP_
