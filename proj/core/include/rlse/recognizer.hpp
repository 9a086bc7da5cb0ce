// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_RECOGNIZER_HPP_
#define RLSE_RECOGNIZER_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rlse/cer.hpp"
#include "rlse/mel.hpp"
#include "rlse/stft.hpp"
#include "rlse/wav.hpp"

namespace rlse {

// What an utterance is scored against: a text transcript (external
// decoders) or a clean reference waveform (mock).
struct Reference {
  std::string transcript;
  std::filesystem::path clean_wav;
};

struct MockParams {
  StftConfig stft;
  int n_mels = 64;
  int sample_rate = 16000;
  double lsd_cal = 1.0;  // log-spectral distance that maps to pseudo-ER 1.0
};

struct RecognizerEndpoint {
  enum class Kind { kMock, kExternal };
  Kind kind = Kind::kMock;

  // External: shell command for a child process speaking line-delimited
  // JSON on stdin/stdout. Request {"id","wav"}, response
  // {"id","transcript"} or {"id","error"}.
  std::string command;
  double timeout_seconds = 30.0;
  std::filesystem::path scratch_dir;  // where score() writes temp WAVs

  MockParams mock;
};

// pseudo-ER = clamp01(LSD(enhanced, clean) / lsd_cal), deterministic and
// monotone in the log-spectral distance. Rejects all-silence references.
double mock_error_rate(const Waveform& enhanced, const Waveform& clean_ref,
                       const MockParams& params);

class Recognizer {
 public:
  virtual ~Recognizer() = default;

  // Transcript of an on-disk waveform. Throws RecognizerError with the
  // utterance id on timeout, malformed response or process failure.
  virtual Transcript recognize(const std::string& utterance_id,
                               const std::filesystem::path& wav_path) = 0;

  // Error rate of in-memory audio against its reference.
  virtual double score(const std::string& utterance_id, const Waveform& audio,
                       const Reference& ref) = 0;
};

// Scores via the log-spectral pseudo-ER. recognize() emits a
// deterministic per-chunk dominant-band signature; it exists for
// protocol symmetry and debugging, the scoring contract is score().
class MockRecognizer : public Recognizer {
 public:
  explicit MockRecognizer(const MockParams& params) : params_(params) {}

  Transcript recognize(const std::string& utterance_id,
                       const std::filesystem::path& wav_path) override;
  double score(const std::string& utterance_id, const Waveform& audio,
               const Reference& ref) override;

 private:
  const Waveform& clean_for(const std::filesystem::path& path);

  MockParams params_;
  std::map<std::string, Waveform> clean_cache_;
};

// Child-process client for the line-delimited JSON protocol. The child
// is spawned lazily, kept alive across requests and respawned after a
// failure. Requests are serialized per process.
class ExternalRecognizer : public Recognizer {
 public:
  ExternalRecognizer(std::string command, double timeout_seconds,
                     std::filesystem::path scratch_dir);
  ~ExternalRecognizer() override;

  ExternalRecognizer(const ExternalRecognizer&) = delete;
  ExternalRecognizer& operator=(const ExternalRecognizer&) = delete;

  Transcript recognize(const std::string& utterance_id,
                       const std::filesystem::path& wav_path) override;
  double score(const std::string& utterance_id, const Waveform& audio,
               const Reference& ref) override;

 private:
  void spawn();
  void shutdown();
  std::string exchange(const std::string& utterance_id, const std::string& request_line);

  std::string command_;
  double timeout_seconds_;
  std::filesystem::path scratch_dir_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
};

std::unique_ptr<Recognizer> make_recognizer(const RecognizerEndpoint& endpoint);

struct BatchEntry {
  std::string id;
  std::filesystem::path wav;
  Reference ref;
};

struct BatchResult {
  std::map<std::string, double> error_rates;
  std::map<std::string, std::string> failures;  // id -> reason
};

// Per-utterance scoring; failures are recorded per id and do not abort
// the batch.
BatchResult batch_recognize(Recognizer& recognizer, const std::vector<BatchEntry>& entries);

// CSV manifest with columns id, wav_path, reference. The reference
// column is a transcript for external endpoints and a clean-WAV path
// (relative to the manifest) for the mock.
std::vector<BatchEntry> load_recognizer_manifest(const std::filesystem::path& path,
                                                 RecognizerEndpoint::Kind kind);

}  // namespace rlse

#endif  // RLSE_RECOGNIZER_HPP_
